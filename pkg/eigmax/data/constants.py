# iteration defaults
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100
POWER_MAX_ITER = 2000

# numerical guards
COLLAPSE_EPS = 1e-12
PIVOT_TOL = 1e-14
SHIFT_NUDGE = 1e-12
ROW_SUM_TOL = 1e-12
CERTIFY_EPS = 1e-12
BREAKDOWN_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-8
PHI_CONDITION_LIMIT = 1e12

# size caps
ORACLE_MAX_SIZE = 64
DENSE_MAX_SIZE = 2000

# initials
DEFAULT_XI = 7 / 8
NEXT_XI = 2 / 5
KILL_FACTOR = 1000.0
R_GRID = 1001
SKIP_THRESHOLD = 0.01
PURE = "pure"
AUTO = "auto"

# norms
L1 = "l1"
L2 = "l2"
WEIGHTED = "weighted"
NORMS = (L1, L2, WEIGHTED)

# matrix classification
NONNEGATIVE = "nonnegative"
Q_MATRIX = "q_matrix"
SHIFTABLE = "shiftable"
INVALID = "invalid"

# trace outcomes
CONVERGED = "converged"
MAX_ITER = "max_iter"
COLLAPSE = "collapse"
SINGULAR_SHIFT = "singular_shift"

# step flags
FLAG_COLLAPSE = "collapse"
FLAG_NUDGED = "nudged"
FLAG_ORTHOGONALITY = "orthogonality_lost"
FLAG_NONPOSITIVE = "nonpositive"

# provenance
TRIDIAGONAL = "tridiagonal"
UNIFORM_I = "uniform_choiceI"
CHOICE_II = "choiceII"
CHOICE_III = "choiceIII"
GENERAL = "general"
NEXT = "next"
TRIVIAL = "trivial"

# next eigenpair variants
QUOTIENT = "617"
EPSILON = "618"
COMBO = "6181"
SCAN = "620"
KILLED = "621"
NEXT_VARIANTS = (QUOTIENT, EPSILON, COMBO, SCAN, KILLED)

# exit codes
EXIT_OK = 0
EXIT_COLLAPSE = 2
EXIT_SINGULAR = 3
EXIT_INVALID = 4
