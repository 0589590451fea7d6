from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from ..data.constants import (AUTO, CHOICE_II, CHOICE_III, GENERAL, L2, PURE, ROW_SUM_TOL, SKIP_THRESHOLD, TRIVIAL,
                              UNIFORM_I, WEIGHTED)
from ..data.errorhandler import (DegenerateError, InvalidInputError, NonpositiveError, SingularShiftError,
                                 get_logger, warn)
from ..pmath.linalg import (Measure, QMat, TriQ, Vec, constant_row_sum, dense_shifted_solve, rayleigh_quotient,
                            shift_to_q, weighted_inner_product)
from .tridiagonal import InitialPair, delta1

__all__ = [
    "EmbeddingChain",
    "HittingProfile",
    "initials_uniform",
    "choice3_z0",
    "initials_choice3",
    "solve_h",
    "embedding_chain",
    "solve_x",
    "level_set_anchor",
    "stationary_mu",
    "hitting_profile",
    "delta1_general",
    "initials_general",
]

_log = get_logger("general")

MatrixLike = Union[QMat, np.ndarray, Iterable]


def _solve(M: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    """
    pivoted dense solve, singularity turned into DegenerateError
    """
    try:
        return np.asarray(dense_shifted_solve(M, 0., rhs))
    except SingularShiftError as e:
        raise DegenerateError(f"singular reduced system for {what}") from e


def _as_qmat(A: MatrixLike) -> QMat:
    return A if isinstance(A, QMat) else QMat(A)


def initials_uniform(A: MatrixLike, choice: str = "I", z0: Optional[float] = None) -> InitialPair:
    """
    uniform ``v0 = (1, ..., 1)/sqrt(N+1)`` with an easy ``z0``

    Choice ``I`` takes ``z0 = max_i A_i`` (or the supplied upper bound of
    ``rho(A)``), which lies above ``rho(A)`` and closer to it than to any other
    eigenvalue. Choice ``II`` takes ``z0 = v0* A v0``, which may converge to a
    non-maximal eigenvalue.

    Returns
    -------
        InitialPair : the pair on the side of ``-Q``, ``Q = A - mI``
    """
    A = _as_qmat(A)
    Q, m = shift_to_q(A)
    v0 = Vec.uniform(A.size)
    if choice == "I":
        top = float(A.row_sums.max()) if z0 is None else float(z0)
        return InitialPair(v0, m - top, UNIFORM_I, shift=m, details={"z0_matrix": top})
    if choice == "II":
        warn("WARNING [general] : Choice II may converge to a non-maximal eigenvalue")
        top = rayleigh_quotient(v0, A)
        return InitialPair(v0, m - top, CHOICE_II, shift=m, details={"z0_matrix": top, "pitfall_warning": True})
    raise InvalidInputError(f"Expected choice 'I' or 'II', got {choice!r}")


def _tridiagonal_part(A: np.ndarray, symmetrize: bool) -> np.ndarray:
    n = A.shape[0]
    up = np.diag(A, 1)
    down = np.diag(A, -1)
    if np.any(up + down <= 0):
        raise DegenerateError("zero coupling between some neighbours i, i+1")
    if symmetrize:
        up = down = (up + down) / 2
    elif np.any(up <= 0) or np.any(down <= 0):
        raise DegenerateError("tridiagonal part has a zero off-diagonal entry, try symmetrize=True")
    t = np.diag(np.diag(A))
    if n > 1:
        t += np.diag(up, 1) + np.diag(down, -1)
    return t


def choice3_z0(A: MatrixLike, symmetrize: bool = True) -> float:
    """
    ``z0`` for ``A`` compared with its tridiagonal part

    The tridiagonal part (of ``(A + A*)/2`` if ``symmetrize``) is read as
    ``T = Q_T + m_T I``; its ``1/delta1`` maps back to ``m_T - 1/delta1``.

    Raises
    ------
        DegenerateError : ``a_{i,i+1} + a_{i+1,i} = 0`` for some ``i``
    """
    A = np.asarray(_as_qmat(A), dtype=np.float64)
    if A.shape[0] == 1:
        return float(A[0, 0])
    T, m = TriQ.from_tridiagonal(_tridiagonal_part(A, symmetrize))
    z0 = m - 1 / delta1(T)
    _log.info("choice III: m=%g z0=%.6g", m, z0)
    return z0


def initials_choice3(A: MatrixLike, symmetrize: bool = True) -> InitialPair:
    """
    uniform ``v0`` with the ``z0`` of ``choice3_z0``
    """
    A = _as_qmat(A)
    _, m = shift_to_q(A)
    top = choice3_z0(A, symmetrize)
    return InitialPair(Vec.uniform(A.size), m - top, CHOICE_III, shift=m,
                       details={"z0_matrix": top, "symmetrize": symmetrize})


def _killing_only_last(Q: QMat) -> bool:
    tol = ROW_SUM_TOL * max(1., Q.scale)
    return bool(np.all(np.abs(Q.row_sums[:-1]) <= tol))


def solve_h(Q: MatrixLike) -> Vec:
    """
    ``h`` with ``h_0 = 1`` solving the rows ``0..N-1`` of ``Qh = 0``

    Falls back to ``h ≡ 1`` when rows ``0..N-1`` are conservative, and, with
    a warning, when the solution has a nonpositive component.

    Raises
    ------
        DegenerateError : singular reduced system
    """
    Q = _as_qmat(Q)
    n = Q.size
    if n == 1 or _killing_only_last(Q):
        return Vec(np.ones(n))
    q = Q.entries
    h = np.concatenate(([1.], _solve(q[:-1, 1:], -q[:-1, 0], "h")))
    if np.any(h <= 0):
        warn("WARNING [general] : h has nonpositive components, falling back to h = 1")
        return Vec(np.ones(n))
    return Vec(h)


@dataclass(frozen=True, eq=False)
class EmbeddingChain:
    """
    EmbeddingChain
    ==============
    ``P = Diag((q_i h_i)^-1) Q Diag(h) + I`` with zero diagonal.

    ``deficits[i] = 1 - sum_j p_ij``, positive on rows that carry killing.
    """
    P: np.ndarray
    anchor: int
    deficits: np.ndarray

    @property
    def substochastic_rows(self) -> tuple[int, ...]:
        """
        rows summing to less than 1
        """
        return tuple(int(i) for i in np.flatnonzero(self.deficits > 1e-12))


@dataclass(frozen=True, eq=False)
class HittingProfile:
    """
    HittingProfile
    ==============
    The vectors of the general construction: ``h`` with ``h_0 = 1``,
    hitting probabilities ``x`` with ``x_anchor = 1`` and the stationary
    measure ``mu`` of the h-transform.
    """
    x: Vec
    h: Vec
    mu: Measure
    anchor: int = 0

    @property
    def vt(self) -> Vec:
        """
        ``h sqrt(x)``
        """
        return Vec(np.asarray(self.h) * np.sqrt(np.asarray(self.x)))


def embedding_chain(Q: MatrixLike, h: Optional[Iterable[float]] = None, anchor: int = 0) -> EmbeddingChain:
    """
    the embedding chain of the h-transform of ``Q``

    Raises
    ------
        DegenerateError : some ``q_i = -q_ii`` is not positive
    """
    Q = _as_qmat(Q)
    q = Q.entries
    h = np.ones(Q.size) if h is None else np.asarray(Vec(h))
    qi = -np.diag(q)
    if np.any(qi <= 0):
        raise DegenerateError("embedding chain needs q_i = -q_ii > 0 everywhere")
    if not 0 <= anchor < Q.size:
        raise InvalidInputError(f"anchor {anchor} out of range")
    P = q * h[None, :] / (qi * h)[:, None] + np.eye(Q.size)
    P[np.diag_indices_from(P)] = 0.
    return EmbeddingChain(P, anchor, 1 - P.sum(axis=1))


def solve_x(chain: EmbeddingChain) -> Vec:
    """
    probabilities ``x`` of hitting the anchor before killing

    ``x_anchor = 1`` and ``x_i = sum_j p_ij x_j`` for ``i != anchor``.
    """
    n = chain.P.shape[0]
    if n == 1:
        return Vec([1.])
    rest = np.array([i for i in range(n) if i != chain.anchor])
    P = chain.P
    M = np.eye(n - 1) - P[np.ix_(rest, rest)]
    x = np.empty(n)
    x[chain.anchor] = 1.
    x[rest] = _solve(M, P[rest, chain.anchor], "x")
    if np.any(x <= 0) or np.any(x > 1 + 1e-10):
        warn("WARNING [general] : hitting probabilities left (0, 1]")
    return Vec(x)


def level_set_anchor(A: MatrixLike) -> int:
    """
    anchor state of the level sets of ``A``

    ``E_0 = {N}``, ``E_k`` collects the unseen states ``i`` with
    ``a_ij > 0`` for some ``j`` in ``E_{k-1}``. In the last level ``E_m``
    the state ``i`` minimizing ``a_ij`` over ``j`` in ``E_{m-1}`` is
    returned, ties going to the smallest index.

    Raises
    ------
        InvalidInputError : some state never reaches ``N``
    """
    a = np.asarray(_as_qmat(A), dtype=np.float64)
    n = a.shape[0]
    off = (a > 0) & ~np.eye(n, dtype=bool)
    seen = np.zeros(n, dtype=bool)
    seen[n - 1] = True
    levels = [np.array([n - 1])]
    while True:
        nxt = np.flatnonzero(~seen & off[:, levels[-1]].any(axis=1))
        if nxt.size == 0:
            break
        seen[nxt] = True
        levels.append(nxt)
    if not seen.all():
        raise InvalidInputError("matrix is reducible, some states never reach N")
    if len(levels) == 1:
        return n - 1
    last, prev = levels[-1], levels[-2]
    best, best_i = np.inf, -1
    for i in last:
        row = a[i, prev]
        v = float(row[row > 0].min())
        if v < best:
            best, best_i = v, int(i)
    return best_i


def stationary_mu(Q: MatrixLike, h: Optional[Iterable[float]] = None, anchor: int = 0) -> Measure:
    """
    stationary measure of the h-transform with its killing removed

    ``Q~ = Diag(h)^-1 Q Diag(h)``; the equations ``mu Q~ = 0`` of columns
    ``0..N-1`` do not involve ``q~_NN`` and are solved with ``mu_anchor = 1``.

    Raises
    ------
        DegenerateError : singular system
        NonpositiveError : the solution is not positive
    """
    Q = _as_qmat(Q)
    n = Q.size
    if n == 1:
        return Measure([1.])
    h = np.ones(n) if h is None else np.asarray(Vec(h))
    qt = Q.entries * h[None, :] / h[:, None]
    mu = np.concatenate(([1.], _solve(qt[1:, :-1].T, -qt[0, :-1], "mu")))
    if np.any(mu <= 0):
        raise NonpositiveError("stationary measure has nonpositive components")
    return Measure(mu / mu[anchor])


def hitting_profile(Q: MatrixLike, h: Optional[Iterable[float]] = None, anchor: int = 0) -> HittingProfile:
    """
    ``x``, ``h`` and ``mu`` of ``Q`` for the given anchor, ``h`` solved if not supplied
    """
    Q = _as_qmat(Q)
    h = solve_h(Q) if h is None else Vec(h)
    x = solve_x(embedding_chain(Q, h, anchor))
    return HittingProfile(x, h, stationary_mu(Q, h, anchor), anchor)


def delta1_general(x: Iterable[float], mu: Union[Measure, Iterable[float]]) -> float:
    """
    ``1/(1 - x_1) max_n [ sqrt(x_n) sum_{k<=n} mu_k sqrt(x_k) + sum_{j>n} mu_j x_j^{3/2} / sqrt(x_n) ]``

    Raises
    ------
        DegenerateError : ``x_1 >= 1``
    """
    x = np.asarray(Vec(x))
    w = mu.weights if isinstance(mu, Measure) else Measure(mu).weights
    if x.size < 2 or w.size != x.size:
        raise InvalidInputError("delta1 needs at least two states and matching lengths")
    if x[1] >= 1:
        raise DegenerateError(f"x_1 = {x[1]} >= 1, killing unreachable")
    if np.any(x <= 0):
        raise NonpositiveError("x must be positive")
    s = np.sqrt(x)
    prefix = np.cumsum(w * s)
    tail = w * x * s
    suffix = np.concatenate((np.cumsum(tail[::-1])[::-1][1:], [0.]))
    return float(np.max(s * prefix + suffix / s) / (1 - x[1]))


def _swap(v: np.ndarray, i: int) -> np.ndarray:
    """
    ``v`` with entries 0 and ``i`` exchanged
    """
    out = np.array(v, dtype=np.float64)
    out[[0, i]] = out[[i, 0]]
    return out


def initials_general(A: MatrixLike,
                     xi: Union[float, str] = AUTO,
                     anchor: Union[int, str] = 0,
                     skip_threshold: Optional[float] = SKIP_THRESHOLD) -> InitialPair:
    """
    initial pair of a general matrix with nonnegative off-diagonals

    Steps
    -----
        1. ``Q = A - mI``; if rows ``0..N-1`` are conservative, ``h ≡ 1``
        2. ``h`` from ``solve_h``; if the h-transformed killing at ``N`` is
           below ``skip_threshold`` times its jump rate, ``x ≡ 1``
        3. ``x`` from the embedding chain, anchored at ``anchor``
        4. ``v~0 = h sqrt(x)``

    Parameters
    ----------
        A : QMat | array-like
            square matrix with nonnegative off-diagonals
        xi : float | str, (optional)
            ``"auto"``: ℓ² ``v0`` and ``z0 = v0*(-Q)v0``;
            ``"pure"``: ℓ² ``v0`` and ``z0 = 1/delta1``;
            a number in [0, 1]: L²(μ) ``v0`` and
            ``z0 = xi/delta1 + (1 - xi)(v0, -Qv0)_mu``
            defaults to ``"auto"``
        anchor : int | str, (optional)
            anchor state, or ``"auto"`` for ``level_set_anchor``
            defaults to 0
        skip_threshold : float | None, (optional)
            ratio of the embedding jump rule, None disables it
            defaults to 0.01

    Returns
    -------
        InitialPair : the pair on the side of ``-Q``
    """
    A = _as_qmat(A)
    Q, m = shift_to_q(A)
    n = Q.size
    if constant_row_sum(A) is not None:
        warn("WARNING [general] : constant row sums, the maximal eigenpair is trivial")
        return InitialPair(Vec.uniform(n), m - float(A.row_sums[0]), TRIVIAL, shift=m, details={"trivial": True})
    if not A.is_irreducible:
        raise InvalidInputError("matrix is reducible")

    jumped = _killing_only_last(Q)
    h = np.ones(n) if jumped else np.asarray(solve_h(Q))

    q = Q.entries
    skipped = False
    if skip_threshold is not None and n > 1:
        jump_rate = float(np.sum(q[-1, :-1] * h[:-1]) / h[-1])
        killing = float(-Q.row_sums[-1] + np.sum(q[-1, :-1] * (1 - h[:-1] / h[-1])))
        skipped = killing < skip_threshold * jump_rate

    if anchor == AUTO:
        anchor = level_set_anchor(Q)
    anchor = int(anchor)
    x = np.ones(n) if skipped else np.asarray(solve_x(embedding_chain(Q, h, anchor)))
    vt = Vec(h * np.sqrt(x))
    details = {"h": Vec(h), "x": Vec(x), "anchor": anchor, "jumped_step2": jumped, "skipped_step3": skipped}
    _log.info("general initials: n=%d m=%g anchor=%d jumped=%s skipped=%s", n, m, anchor, jumped, skipped)

    if xi == AUTO:
        v0 = vt.normalized(L2)
        return InitialPair(v0, rayleigh_quotient(v0, Q.negated()), GENERAL, shift=m, details=details)

    mu = stationary_mu(Q, h, anchor)
    d = delta1_general(_swap(x, anchor), _swap(mu.weights, anchor))
    details.update(mu=mu, delta1=d, profile=HittingProfile(Vec(x), Vec(h), mu, anchor))
    if xi == PURE:
        return InitialPair(vt.normalized(L2), 1 / d, GENERAL, shift=m, details=details)
    if isinstance(xi, str) or not 0 <= xi <= 1:
        raise InvalidInputError(f"Expected xi in [0, 1], {AUTO!r} or {PURE!r}, got {xi!r}")
    v0 = vt.normalized(WEIGHTED, mu)
    quotient = weighted_inner_product(v0, Q.negated() @ np.asarray(v0), mu)
    z0 = xi / d + (1 - xi) * quotient
    return InitialPair(v0, z0, GENERAL, WEIGHTED, mu, xi=float(xi), shift=m, details=details)
