import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Union

import numpy as np
import scipy.linalg as sla
from scipy.sparse.csgraph import connected_components

from ..data.constants import (COLLAPSE_EPS, INVALID, L1, L2, NONNEGATIVE, NORMS, PIVOT_TOL, Q_MATRIX,
                              ROW_SUM_TOL, SHIFTABLE, WEIGHTED)
from ..data.errorhandler import (DimensionMismatchError, InvalidInputError, NonpositiveError,
                                 SingularShiftError, get_logger)

__all__ = [
    "Vec",
    "Measure",
    "QMat",
    "TriQ",
    "Spectrum",
    "Classification",
    "validate_q",
    "shift_to_q",
    "constant_row_sum",
    "weighted_inner_product",
    "weighted_norm",
    "dense_shifted_solve",
    "matvec",
    "rayleigh_quotient",
]

_log = get_logger("linalg")

MeasureLike = Union["Measure", np.ndarray, Iterable[float], None]


def _weights(mu: MeasureLike, n: int) -> Optional[np.ndarray]:
    """
    raw weight array of ``mu`` checked against length ``n``, None for the unit measure
    """
    if mu is None:
        return None
    w = mu.weights if isinstance(mu, Measure) else np.asarray(mu, dtype=np.float64)
    if w.shape != (n, ):
        raise DimensionMismatchError(f"Expected a measure of length {n}, got {w.shape}")
    return w


class Vec(np.ndarray):
    """
    Vec
    ===
    provides :
    1. real vectors indexed by the states ``0..N``
    2. plain, ℓ¹ and weighted L²(μ) norms and inner products
    3. sign diagnostics used to detect collapsing iterations

    Vec is a thin numpy subclass, so every numpy operation applies and returns
    a Vec where numpy would return an array.

    Examples
    --------
        >>> v = Vec([3, 4])
        >>> v.norm()
        5.0

        >>> Vec.uniform(4)
        Vec([0.5, 0.5, 0.5, 0.5])

    Parameters
    ----------
        entries : Iterable[float]
            the components, ``Fraction`` and ``int`` are converted to float
    """
    def __new__(cls, entries: Iterable[float]) -> "Vec":
        """
        new Vec instance

        Parameters
        ----------
            entries : Iterable[float]
                components of the vector

        Returns
        -------
            Vec : new vector, always a copy of ``entries``
        """
        obj = np.array(entries, dtype=np.float64).view(cls)
        if obj.ndim != 1 or obj.size == 0:
            raise InvalidInputError(f"Expected a non-empty one dimensional vector, got shape {obj.shape}")
        if not np.all(np.isfinite(obj)):
            raise InvalidInputError("Expected finite entries")
        return obj

    @classmethod
    def uniform(cls, n: int) -> "Vec":
        """
        the constant vector ``(1, ..., 1)/sqrt(n)``
        """
        if n < 1:
            raise InvalidInputError(f"Expected a positive length, got {n}")
        return cls(np.full(n, 1 / np.sqrt(n)))

    @classmethod
    def basis(cls, n: int, i: int) -> "Vec":
        """
        the ``i``-th unit vector of length ``n``
        """
        if not 0 <= i < n:
            raise InvalidInputError(f"Expected an index in [0, {n}), got {i}")
        e = np.zeros(n)
        e[i] = 1.
        return cls(e)

    def inner(self, other: Iterable[float], mu: MeasureLike = None) -> float:
        """
        inner product, weighted by ``mu`` if given
        """
        return weighted_inner_product(self, other, mu)

    def norm(self, kind: str = L2, mu: MeasureLike = None) -> float:
        """
        norm of the vector

        Parameters
        ----------
            kind : str, (optional)
                one of ``l1``, ``l2`` or ``weighted``
                defaults to ``l2``
            mu : Measure, (optional)
                weights of the ``weighted`` norm

        Returns
        -------
            float : the norm
        """
        v = np.asarray(self)
        if kind == L1:
            return float(np.sum(np.abs(v)))
        if kind == L2:
            return float(np.linalg.norm(v))
        if kind == WEIGHTED:
            return weighted_norm(v, mu)
        raise InvalidInputError(f"Expected a norm in {NORMS}, got {kind!r}")

    def normalized(self, kind: str = L2, mu: MeasureLike = None) -> "Vec":
        """
        the vector scaled to unit norm
        """
        n = self.norm(kind, mu)
        if n == 0:
            raise InvalidInputError("cannot normalize the zero vector")
        return Vec(np.asarray(self) / n)

    def has_mixed_signs(self, eps: float = COLLAPSE_EPS) -> bool:
        """
        True if components above ``eps`` (relative to the largest one) take both signs
        """
        v = np.asarray(self)
        big = v[np.abs(v) > eps * np.max(np.abs(v))]
        return bool(np.any(big > 0) and np.any(big < 0))

    def is_positive(self) -> bool:
        """
        all components strictly positive
        """
        return bool(np.all(np.asarray(self) > 0))

    def oriented(self) -> "Vec":
        """
        the vector with its largest-magnitude component made positive
        """
        v = np.asarray(self)
        return Vec(-v) if v[np.argmax(np.abs(v))] < 0 else Vec(v)


@dataclass(frozen=True, eq=False)
class Measure:
    """
    Measure
    =======
    Positive weights ``mu_0..mu_N`` defining the space L²(μ).

    Parameters
    ----------
        weights : Iterable[float]
            strictly positive, finite weights
    """
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise InvalidInputError(f"Expected a non-empty one dimensional measure, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise NonpositiveError("measure weights must be finite and strictly positive")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, n: int) -> "Measure":
        """
        the counting measure on ``n`` states
        """
        return cls(np.ones(n))

    def __len__(self) -> int:
        return self.weights.size

    def __getitem__(self, i: int) -> float:
        return float(self.weights[i])

    @property
    def total(self) -> float:
        """
        sum of the weights
        """
        return float(np.sum(self.weights))

    def as_probability(self) -> "Measure":
        """
        the normalized measure ``pi = mu / sum(mu)``
        """
        return Measure(self.weights / self.total)

    def scaled_to(self, i: int) -> "Measure":
        """
        the measure rescaled so that ``mu_i = 1``
        """
        return Measure(self.weights / self.weights[i])


def weighted_inner_product(u: Iterable[float], v: Iterable[float], mu: MeasureLike = None) -> float:
    """
    ``sum_i mu_i u_i v_i``, the plain dot product when ``mu`` is None

    Raises
    ------
        DimensionMismatchError : if lengths differ
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionMismatchError(f"Expected vectors of equal length, got {u.shape} and {v.shape}")
    w = _weights(mu, u.size)
    if w is None:
        return float(u @ v)
    return float(np.sum(w * u * v))


def weighted_norm(u: Iterable[float], mu: MeasureLike = None) -> float:
    """
    square root of ``(u, u)_mu``
    """
    return float(np.sqrt(weighted_inner_product(u, u, mu)))


@dataclass(frozen=True)
class Classification:
    """
    Classification
    ==============
    Result of ``validate_q``.

    Note
    ----
    ``kind`` only looks at signs, irreducibility is reported separately;
    ``seed`` folds both into the label a solver would act on.
    """
    kind: str
    irreducible: bool

    @property
    def seed(self) -> str:
        """
        ``kind``, or ``invalid`` when the matrix is reducible
        """
        return self.kind if self.irreducible else INVALID


def _square(M: Union["QMat", np.ndarray, Iterable]) -> np.ndarray:
    a = np.array(M, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatchError(f"Expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("Expected finite entries")
    return a


def _off_diagonal(a: np.ndarray) -> np.ndarray:
    return a[~np.eye(a.shape[0], dtype=bool)]


def _irreducible(a: np.ndarray) -> bool:
    """
    strong connectivity of the graph of positive off-diagonal entries
    """
    if a.shape[0] == 1:
        return True
    graph = (a > 0) & ~np.eye(a.shape[0], dtype=bool)
    n_components, _ = connected_components(graph.astype(np.int8), directed=True, connection="strong")
    return n_components == 1


class QMat:
    """
    QMat
    ====
    provides :
    1. a dense square matrix with nonnegative off-diagonal entries
    2. cached row sums and an irreducibility check
    3. Q-matrix tags (row sums ≤ 0, conservative)

    The entries are stored read-only, so a QMat is safe to share.

    Examples
    --------
        >>> Q = QMat([[-1, 1], [2, -3]])
        >>> Q.row_sums
        array([ 0., -1.])
        >>> Q.is_q_matrix, Q.is_irreducible
        (True, True)

    Parameters
    ----------
        entries : array-like
            square matrix, off-diagonal entries must be ≥ 0
    """
    def __init__(self, entries: Union["QMat", np.ndarray, Iterable]) -> None:
        a = _square(entries)
        if np.any(_off_diagonal(a) < 0):
            raise InvalidInputError("off-diagonal entries must be nonnegative")
        a.flags.writeable = False
        self._a = a

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return self._a if dtype is None else self._a.astype(dtype)

    def __repr__(self) -> str:
        return f"QMat({self._a.tolist()})"

    @property
    def entries(self) -> np.ndarray:
        """
        gets the read-only entries
        """
        return self._a

    @property
    def size(self) -> int:
        """
        number of states ``N + 1``
        """
        return self._a.shape[0]

    @property
    def N(self) -> int:
        """
        largest state index
        """
        return self.size - 1

    @cached_property
    def row_sums(self) -> np.ndarray:
        """
        gets the row sums ``A_i``
        """
        s = self._a.sum(axis=1)
        s.flags.writeable = False
        return s

    @cached_property
    def is_irreducible(self) -> bool:
        """
        strongly connected graph of positive off-diagonals
        """
        return _irreducible(self._a)

    @property
    def scale(self) -> float:
        """
        largest absolute entry
        """
        return float(np.max(np.abs(self._a)))

    @property
    def is_q_matrix(self) -> bool:
        """
        every row sum is ≤ 0 (within rounding)
        """
        return bool(np.all(self.row_sums <= ROW_SUM_TOL * max(1., self.scale)))

    @property
    def is_conservative(self) -> bool:
        """
        every row sum is 0 (within rounding)
        """
        return bool(np.all(np.abs(self.row_sums) <= ROW_SUM_TOL * max(1., self.scale)))

    def negated(self) -> np.ndarray:
        """
        ``-Q`` as a plain array (it is not a QMat)
        """
        return -self._a

    def shifted(self, m: float) -> "QMat":
        """
        ``Q - mI``
        """
        return QMat(self._a - m * np.eye(self.size))

    def matvec(self, v: Iterable[float]) -> Vec:
        """
        the product ``Qv``
        """
        return Vec(self._a @ np.asarray(v, dtype=np.float64))


def validate_q(M: Union[QMat, np.ndarray, Iterable]) -> Classification:
    """
    classifies a square matrix

    ``q_matrix`` when off-diagonals are ≥ 0 and row sums ≤ 0, else
    ``nonnegative`` when every entry is ≥ 0, else ``shiftable`` when only
    off-diagonals are ≥ 0, else ``invalid``. Irreducibility is always reported.
    """
    a = _square(M)
    tol = ROW_SUM_TOL * max(1., float(np.max(np.abs(a))))
    if np.any(_off_diagonal(a) < 0):
        kind = INVALID
    elif np.all(a.sum(axis=1) <= tol):
        kind = Q_MATRIX
    elif np.all(a >= 0):
        kind = NONNEGATIVE
    else:
        kind = SHIFTABLE
    return Classification(kind, _irreducible(a))


def constant_row_sum(A: Union[QMat, np.ndarray, Iterable]) -> Optional[float]:
    """
    the common row sum if all row sums agree (within rounding), else None
    """
    a = np.asarray(A, dtype=np.float64)
    s = a.sum(axis=1)
    if np.ptp(s) <= ROW_SUM_TOL * max(1., float(np.max(np.abs(a)))):
        return float(s.max())
    return None


def shift_to_q(A: Union[QMat, np.ndarray, Iterable]) -> tuple[QMat, float]:
    """
    shifts ``A`` into a Q-matrix

    Parameters
    ----------
        A : QMat | array-like
            square matrix with nonnegative off-diagonal entries

    Returns
    -------
        tuple[QMat, float] : ``Q = A - mI`` and ``m``, the largest row sum if
        positive and 0 otherwise, so that ``lambda_min(-Q) + rho(A) = m``
    """
    A = A if isinstance(A, QMat) else QMat(A)
    m = float(max(A.row_sums.max(), 0.))
    return (A.shifted(m) if m > 0 else A), m


@dataclass(frozen=True, eq=False)
class TriQ:
    """
    TriQ
    ====
    Tridiagonal Q-matrix on states ``0..N`` given by its rates.

    Row ``i`` of ``Q`` is ``a_i`` at ``i-1``, ``b_i`` at ``i+1`` and
    ``-(a_i + b_i + c_i)`` on the diagonal, with ``a_0 = b_N = 0``.

    Parameters
    ----------
        a : Iterable[float]
            down rates ``a_1..a_N``, all > 0
        b : Iterable[float]
            up rates ``b_0..b_{N-1}``, all > 0
        c : Iterable[float]
            killing rates ``c_0..c_N``, all ≥ 0

    Note
    ----
    Every method that works with a TriQ as an operator uses ``-Q``, the
    positive semi-definite side where the maximal eigenpair is the smallest.
    """
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    _diag: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        a = np.array(self.a, dtype=np.float64).ravel()
        b = np.array(self.b, dtype=np.float64).ravel()
        c = np.array(self.c, dtype=np.float64).ravel()
        if c.size == 0 or a.size != c.size - 1 or b.size != c.size - 1:
            raise DimensionMismatchError(
                f"Expected a and b of length N and c of length N+1, got {a.size}, {b.size}, {c.size}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise InvalidInputError("Expected finite rates")
        if np.any(a <= 0) or np.any(b <= 0):
            raise NonpositiveError("rates a_i and b_i must be strictly positive")
        if np.any(c < 0):
            raise NonpositiveError("killing rates c_i must be nonnegative")
        for name, arr in (("a", a), ("b", b), ("c", c)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        diag = self.a_full + self.b_full + c
        diag.flags.writeable = False
        object.__setattr__(self, "_diag", diag)

    @classmethod
    def from_tridiagonal(cls, T: Union[np.ndarray, Iterable]) -> tuple["TriQ", float]:
        """
        reads a tridiagonal matrix with positive off-diagonals as ``T = Q + mI``

        Returns
        -------
            tuple[TriQ, float] : the TriQ and ``m``, the largest row sum of T
        """
        t = _square(T)
        n = t.shape[0]
        band = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) <= 1
        if np.any(t[~band] != 0):
            raise InvalidInputError("matrix is not tridiagonal")
        sub = np.diag(t, -1)
        sup = np.diag(t, 1)
        if np.any(sub <= 0) or np.any(sup <= 0):
            raise NonpositiveError("tridiagonal part needs strictly positive off-diagonals")
        s = t.sum(axis=1)
        m = float(s.max())
        return cls(sub, sup, np.maximum(m - s, 0.)), m

    @property
    def N(self) -> int:
        """
        largest state index
        """
        return self.c.size - 1

    @property
    def size(self) -> int:
        """
        number of states ``N + 1``
        """
        return self.c.size

    @property
    def a_full(self) -> np.ndarray:
        """
        down rates padded with ``a_0 = 0``
        """
        return np.concatenate(([0.], self.a))

    @property
    def b_full(self) -> np.ndarray:
        """
        up rates padded with ``b_N = 0``
        """
        return np.concatenate((self.b, [0.]))

    @property
    def is_case1(self) -> bool:
        """
        killing only at the last state
        """
        return bool(np.all(self.c[:-1] == 0))

    @property
    def is_conservative(self) -> bool:
        """
        no killing at all
        """
        return bool(np.all(self.c == 0))

    def to_qmat(self) -> QMat:
        """
        dense expansion of ``Q``
        """
        q = np.diag(-self._diag)
        if self.N > 0:
            q += np.diag(self.b, 1) + np.diag(self.a, -1)
        return QMat(q)

    def neg_matvec(self, v: Iterable[float]) -> Vec:
        """
        the product ``-Qv`` in O(N)
        """
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.size, ):
            raise DimensionMismatchError(f"Expected a vector of length {self.size}, got {v.shape}")
        w = self._diag * v
        w[1:] -= self.a * v[:-1]
        w[:-1] -= self.b * v[1:]
        return Vec(w)

    def banded(self, z: float = 0.) -> np.ndarray:
        """
        ``-Q - zI`` in the ``(1, 1)`` band storage of ``scipy.linalg.solve_banded``
        """
        ab = np.zeros((3, self.size))
        ab[0, 1:] = -self.b
        ab[1] = self._diag - z
        ab[2, :-1] = -self.a
        return ab

    def scaled(self, s: float) -> "TriQ":
        """
        all rates multiplied by ``s > 0``
        """
        if s <= 0:
            raise NonpositiveError(f"Expected a positive scale, got {s}")
        return TriQ(s * self.a, s * self.b, s * self.c)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Spectrum
    ========
    Eigenvalues sorted by decreasing modulus.
    """
    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        ev = np.asarray(self.eigenvalues, dtype=np.complex128)
        ev = ev[np.lexsort((-ev.real, -np.abs(ev)))]
        ev.flags.writeable = False
        object.__setattr__(self, "eigenvalues", ev)

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def max_real(self) -> float:
        """
        the eigenvalue of largest real part, the Perron root for nonnegative off-diagonals
        """
        return float(self.eigenvalues.real.max())

    @property
    def min_real(self) -> float:
        """
        the eigenvalue of smallest real part, ``lambda_0`` when applied to ``-Q``
        """
        return float(self.eigenvalues.real.min())

    def real_sorted(self) -> np.ndarray:
        """
        real parts in increasing order
        """
        return np.sort(self.eigenvalues.real)


def matvec(M: Union[QMat, TriQ, np.ndarray], v: Iterable[float]) -> Vec:
    """
    ``Mv``, where a TriQ stands for its ``-Q``
    """
    if isinstance(M, TriQ):
        return M.neg_matvec(v)
    return Vec(np.asarray(M, dtype=np.float64) @ np.asarray(v, dtype=np.float64))


def dense_shifted_solve(M: Union[QMat, np.ndarray], z: float, v: Iterable[float]) -> Vec:
    """
    solves ``(M - zI) w = v`` by row-pivoted LU

    Parameters
    ----------
        M : QMat | ndarray
            square matrix
        z : float
            shift
        v : Iterable[float]
            right hand side

    Returns
    -------
        Vec : the solution ``w``

    Raises
    ------
        SingularShiftError : a pivot fell below ``1e-14`` times the largest entry
    """
    a = np.array(M, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or v.shape != (a.shape[0], ):
        raise DimensionMismatchError(f"Expected a square system, got {a.shape} and {v.shape}")
    a[np.diag_indices_from(a)] -= z
    scale = float(np.max(np.abs(a)))
    if scale == 0:
        raise SingularShiftError("M - zI is the zero matrix", z=z)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < PIVOT_TOL * scale:
        raise SingularShiftError(f"M - zI is singular at z = {z!r}", z=z)
    return Vec(sla.lu_solve((lu, piv), v, check_finite=False))


def rayleigh_quotient(v: Iterable[float], M: Union[QMat, TriQ, np.ndarray], mu: MeasureLike = None) -> float:
    """
    ``(v, Mv)_mu / (v, v)_mu``

    Raises
    ------
        InvalidInputError : ``v`` is the zero vector
    """
    v = np.asarray(v, dtype=np.float64)
    den = weighted_inner_product(v, v, mu)
    if den == 0:
        raise InvalidInputError("Rayleigh quotient of the zero vector")
    return weighted_inner_product(v, matvec(M, v), mu) / den
