from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from ..data.constants import DEFAULT_XI, L2, PHI_CONDITION_LIMIT, PURE, TRIDIAGONAL, WEIGHTED
from ..data.errorhandler import (DegenerateError, InvalidInputError, NonpositiveError, TrivialSpectrumError,
                                 get_logger, warn)
from ..pmath.linalg import Measure, TriQ, Vec, weighted_inner_product

__all__ = [
    "TriSequences",
    "InitialPair",
    "mu_sequence",
    "phi_and_h",
    "delta1",
    "initials_tridiagonal",
]

_log = get_logger("tridiagonal")

CASE1 = "case1"
CASE2 = "case2"


@dataclass(frozen=True, eq=False)
class InitialPair:
    """
    InitialPair
    ===========
    A starting pair ``(v0, z0)`` for Rayleigh quotient iteration.

    The pair targets ``-Q`` where ``Q = A - shift * I``; an eigenvalue ``z``
    found on that side reads ``shift - z`` on the side of ``A``.

    Parameters
    ----------
        v0 : Vec
            starting vector, of unit norm in ``norm``
        z0 : float
            starting shift
        provenance : str
            name of the construction that produced the pair
        norm : str, (optional)
            ``l1``, ``l2`` or ``weighted``
            defaults to ``l2``
        mu : Measure, (optional)
            weights of the ``weighted`` norm
        xi : float, (optional)
            convex combination parameter, if any
        r0 : float, (optional)
            first component picked by an r-scan, if any
        shift : float, (optional)
            the ``m`` of ``Q = A - mI``
            defaults to 0
        details : dict, (optional)
            intermediate quantities (δ₁, anchor, jump rules, ...)
    """
    v0: Vec
    z0: float
    provenance: str
    norm: str = L2
    mu: Optional[Measure] = None
    xi: Optional[float] = None
    r0: Optional[float] = None
    shift: float = 0.
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        v0 = Vec(self.v0)
        mu = self.mu if self.mu is None or isinstance(self.mu, Measure) else Measure(self.mu)
        if not np.isfinite(self.z0):
            raise InvalidInputError(f"initial shift must be finite, got {self.z0}")
        n = v0.norm(self.norm, mu)
        if abs(n - 1) > 1e-8:
            raise InvalidInputError(f"v0 must have unit {self.norm} norm, got {n}")
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "z0", float(self.z0))

    def matrix_side(self, z: float) -> float:
        """
        ``shift - z``, an eigenvalue of ``-Q`` read on the side of ``A``
        """
        return self.shift - z


@dataclass(frozen=True, eq=False)
class TriSequences:
    """
    TriSequences
    ============
    The sequences behind the tridiagonal initials.

    ``h`` has ``N + 2`` entries (``h_0..h_{N+1}``), ``r`` has ``N`` entries
    and is identically 1 in case 1.
    """
    mu: Measure
    r: np.ndarray
    h: np.ndarray
    phi: np.ndarray
    case: str


def mu_sequence(T: TriQ) -> Measure:
    """
    ``mu_0 = 1``, ``mu_n = mu_{n-1} b_{n-1} / a_n``
    """
    if T.N == 0:
        return Measure([1.])
    logs = np.concatenate(([0.], np.cumsum(np.log(T.b) - np.log(T.a))))
    return Measure(np.exp(logs))


def phi_and_h(T: TriQ, case: Optional[str] = None) -> TriSequences:
    """
    the sequences ``mu``, ``r``, ``h`` and ``phi`` of a TriQ

    Case 1 (killing only at ``N``) uses

        phi_n = sum_{k >= n} 1/(mu_k b_k),  with b_N := c_N

    Case 2 uses ``r_0 = 1 + c_0/b_0``,
    ``r_n = 1 + c_n/b_n + (a_n/b_n)(1 - 1/r_{n-1})``, ``h_n = h_{n-1} r_{n-1}``,
    ``h_{N+1} = c_N h_N + a_N (h_{N-1} - h_N)`` and

        phi_n = sum_{k >= n} 1/(h_k h_{k+1} mu_k b_k),  with b_N := 1

    Parameters
    ----------
        T : TriQ
            the matrix
        case : str, (optional)
            force ``case2`` on a case 1 input, otherwise chosen from ``c``

    Raises
    ------
        TrivialSpectrumError : no killing at all
        NonpositiveError : some ``r_n <= 0``
    """
    if T.is_conservative:
        raise TrivialSpectrumError("Q has the trivial maximal eigenvalue 0 (all c_i = 0)")
    if case not in (None, CASE1, CASE2):
        raise InvalidInputError(f"Expected case in ({CASE1!r}, {CASE2!r}), got {case!r}")
    case = case or (CASE1 if T.is_case1 else CASE2)
    N = T.N
    mu = mu_sequence(T)
    b = T.b_full

    if case == CASE1:
        if T.c[N] == 0:
            raise TrivialSpectrumError("Q has the trivial maximal eigenvalue 0 (c_N = 0)")
        r = np.ones(N)
        h = np.ones(N + 2)
        h[N + 1] = T.c[N]
        b[N] = T.c[N]
        den = mu.weights * b
    else:
        r = np.empty(N)
        a = T.a_full
        for n in range(N):
            r[n] = 1 + T.c[n] / b[n] + (a[n] / b[n] * (1 - 1 / r[n - 1]) if n > 0 else 0.)
            if r[n] <= 0:
                raise NonpositiveError(f"r_{n} = {r[n]} is not positive")
        h = np.ones(N + 2)
        h[1:N + 1] = np.cumprod(r)
        h[N + 1] = T.c[N] * h[N] + (a[N] * (h[N - 1] - h[N]) if N > 0 else 0.)
        if h[N + 1] <= 0:
            raise NonpositiveError(f"h_{N + 1} = {h[N + 1]} is not positive")
        b[N] = 1.
        den = h[:-1] * h[1:] * mu.weights * b

    phi = np.cumsum((1 / den)[::-1])[::-1]
    if not np.all(np.isfinite(phi)) or not np.all(np.isfinite(h)) or np.any(phi <= 0):
        raise DegenerateError("phi or h over/underflowed, the chain is close to reducible")
    if phi.max() / phi.min() > PHI_CONDITION_LIMIT:
        warn(f"WARNING [tridiagonal] : phi spans {phi.max() / phi.min():.3g}, extreme conditioning")
    return TriSequences(mu, r, h, phi, case)


def delta1(T: Union[TriQ, TriSequences]) -> float:
    """
    the quantity whose reciprocal is a lower bound of ``lambda_0``

        max_n [ sqrt(phi_n) sum_{k<=n} mu_k h_k^2 sqrt(phi_k)
                + sum_{j>n} mu_j h_j^2 phi_j^{3/2} / sqrt(phi_n) ]

    evaluated with prefix and suffix sums.
    """
    seqs = T if isinstance(T, TriSequences) else phi_and_h(T)
    N = seqs.phi.size - 1
    s = np.sqrt(seqs.phi)
    mh2 = seqs.mu.weights * seqs.h[:N + 1]**2
    prefix = np.cumsum(mh2 * s)
    tail = mh2 * seqs.phi * s
    suffix = np.concatenate((np.cumsum(tail[::-1])[::-1][1:], [0.]))
    return float(np.max(s * prefix + suffix / s))


def initials_tridiagonal(T: TriQ, xi: Union[float, str] = DEFAULT_XI) -> InitialPair:
    """
    initial pair of a tridiagonal Q-matrix

    ``v~0(i) = h_i sqrt(phi_i)``. In ``pure`` mode ``v0`` is ℓ²-normalized and
    ``z0 = 1/delta1``; with a number ``xi`` in [0, 1], ``v0`` is normalized in
    L²(μ) and ``z0 = xi/delta1 + (1 - xi)(v0, -Q v0)_mu``.

    Parameters
    ----------
        T : TriQ
            the matrix
        xi : float | str, (optional)
            ``"pure"`` or the combination parameter
            defaults to 7/8

    Returns
    -------
        InitialPair : the pair, on the side of ``-Q``
    """
    seqs = phi_and_h(T)
    d = delta1(seqs)
    vt = Vec(seqs.h[:-1] * np.sqrt(seqs.phi))
    details = {"delta1": d, "case": seqs.case}
    _log.info("tridiagonal initials: N=%d %s delta1=%.6g", T.N, seqs.case, d)
    if xi == PURE:
        return InitialPair(vt.normalized(L2), 1 / d, TRIDIAGONAL, details=details)
    if isinstance(xi, str) or not 0 <= xi <= 1:
        raise InvalidInputError(f"Expected xi in [0, 1] or {PURE!r}, got {xi!r}")
    v0 = vt.normalized(WEIGHTED, seqs.mu)
    quotient = weighted_inner_product(v0, T.neg_matvec(v0), seqs.mu)
    z0 = xi / d + (1 - xi) * quotient
    return InitialPair(v0, z0, TRIDIAGONAL, WEIGHTED, seqs.mu, xi=float(xi), details=details)
