"""
Eigmax
======

Provides
 1. Vectors, measures and Q-matrices with validated invariants
 2. Power, inverse and Rayleigh quotient iterations with auditable traces
 3. Explicit initial pairs for the maximal eigenpair of tridiagonal and general matrices
 4. Collatz-Wielandt and birth-death bounds that certify every iterate
 5. Initial pairs and a centered iteration for the next-to-maximal eigenpair
 6. Two-sided Lanczos tridiagonalization
 7. A command line front door with a benchmark sweep

Initialization
--------------
>>> # from now on we will assume everything is imported as followed
... from eigmax import *
>>> A = [[1, 2, 3], [1, 2, 1], [3, 2, 1]]
>>> result = solve_maximal(A, strategy="general")
>>> round(result.value, 5)
5.23607

Matrices
--------
Every input is a square matrix with nonnegative off-diagonal entries. It is
shifted into a Q-matrix ``Q = A - mI`` (row sums ≤ 0) and every iteration
runs on ``-Q``, where the maximal eigenvalue of ``A`` becomes the smallest
one, ``lambda_0``. Values read back on the side of ``A`` are ``m - z``.

>>> Q, m = shift_to_q(A)
>>> m
6.0

Birth-death matrices are stored by their rates only
>>> T = TriQ(a=[1, 4], b=[1, 4], c=[0, 0, 9])
>>> T.neg_matvec([1, 1, 1])
Vec([0., 0., 9.])

Initial pairs
-------------
The tridiagonal construction builds ``v0`` and ``z0`` from explicit
sequences, ``z0 = 1/delta1`` being a lower bound of ``lambda_0``. In mixed
mode ``z0`` combines that bound with a Rayleigh quotient:

>>> init = initials_tridiagonal(T, xi=7/8)
>>> trace = rqi(T, init)
>>> trace.outcome
'converged'

General matrices go through ``initials_general`` (h-transform, embedding
chain, hitting probabilities), or the uniform choices ``initials_uniform``
and ``initials_choice3``.

Bounds
------
>>> bounds = collatz_wielandt(T, trace.final_v.oriented(), mode="q")
>>> bounds.lower <= trace.final_z <= bounds.upper
True

Next eigenpair
--------------
For conservative matrices ``lambda_0 = 0`` and the interesting value is
``lambda_1``. ``initials_next_tridiagonal`` and ``initials_next_general``
build centered pairs, ``rqi_next`` iterates and watches the centering.

Please note
-----------
Collapse (an iterate with mixed signs) is not an exception: it is recorded
in the trace outcome. Non fatal diagnostics are emitted as ``EigmaxWarning``
through the error handler, formatted ``WARNING [module] : text``.
"""

from .data import *
from .pmath import *
from .core import *

from .__version__ import __title__
from .__version__ import __description__
from .__version__ import __url__
from .__version__ import __version__
from .__version__ import __author__
from .__version__ import __license__
