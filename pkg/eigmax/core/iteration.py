import json
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Union

import numpy as np
import scipy.linalg as sla

from ..data.constants import (COLLAPSE, CONVERGED, DEFAULT_MAX_ITER, DEFAULT_TOL, FLAG_COLLAPSE, FLAG_NUDGED, L2,
                              MAX_ITER, NORMS, POWER_MAX_ITER, SHIFT_NUDGE, SINGULAR_SHIFT, WEIGHTED)
from ..data.errorhandler import InvalidInputError, NonpositiveError, SingularShiftError, get_logger
from ..pmath.linalg import (Measure, QMat, TriQ, Vec, dense_shifted_solve, matvec, rayleigh_quotient,
                            weighted_inner_product)
from .tridiagonal import InitialPair, mu_sequence

__all__ = [
    "IterationOptions",
    "IterationStep",
    "IterationTrace",
    "IIReport",
    "as_operator",
    "power_iteration",
    "inverse_iteration",
    "rqi",
    "tridiag_solve_G",
    "ii_operator",
    "ii_iteration",
]

_log = get_logger("iteration")

Matrix = Union[QMat, TriQ, np.ndarray]


@dataclass(frozen=True, eq=False)
class IterationOptions:
    """
    IterationOptions
    ================
    Knobs shared by the iteration engines.

    Parameters
    ----------
        norm : str, (optional)
            ``l1``, ``l2`` or ``weighted``
            defaults to ``l2``
        mu : Measure, (optional)
            weights, required by the ``weighted`` norm
        tol : float, (optional)
            relative change of successive z's that ends the run
            defaults to 1e-10
        max_iter : int, (optional)
            defaults to 100
        track_vectors : bool, (optional)
            keep every iterate in the trace, otherwise only the last one
            defaults to True
        detect_collapse : bool, (optional)
            flag mixed-sign iterates
            defaults to True
    """
    norm: str = L2
    mu: Optional[Measure] = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    track_vectors: bool = True
    detect_collapse: bool = True

    def __post_init__(self) -> None:
        if self.norm not in NORMS:
            raise InvalidInputError(f"Expected a norm in {NORMS}, got {self.norm!r}")
        if not self.tol > 0:
            raise InvalidInputError(f"Expected tol > 0, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidInputError(f"Expected max_iter >= 1, got {self.max_iter}")
        if self.norm == WEIGHTED and self.mu is None:
            raise InvalidInputError("the weighted norm needs a measure")
        if self.mu is not None and not isinstance(self.mu, Measure):
            object.__setattr__(self, "mu", Measure(self.mu))

    @property
    def weights(self) -> Optional[Measure]:
        """
        the measure entering inner products, None unless the norm is weighted
        """
        return self.mu if self.norm == WEIGHTED else None

    def norm_of(self, v: Iterable[float]) -> float:
        """
        norm of ``v`` in the configured norm
        """
        return Vec(v).norm(self.norm, self.mu)

    def normalize(self, v: Iterable[float]) -> Vec:
        """
        ``v`` scaled to unit configured norm
        """
        return Vec(v).normalized(self.norm, self.mu)

    def inner(self, u: Iterable[float], v: Iterable[float]) -> float:
        """
        inner product matching the configured norm
        """
        return weighted_inner_product(u, v, self.weights)


@dataclass(frozen=True, eq=False)
class IterationStep:
    """
    one recorded step, ``ratio`` is the entrywise (min, max) of ``w_k / v_{k-1}``
    """
    k: int
    z: float
    v: Optional[Vec]
    residual: float
    flags: tuple[str, ...] = ()
    ratio: Optional[tuple[float, float]] = None

    def to_record(self) -> dict:
        return {"k": self.k, "z": self.z, "residual": self.residual, "flags": list(self.flags)}


@dataclass(frozen=True, eq=False)
class IterationTrace:
    """
    IterationTrace
    ==============
    Auditable record of an iteration run.

    ``outcome`` is ``collapse`` as soon as some iterate was flagged, whether
    or not z settled afterwards (``settled`` tells); otherwise ``converged``,
    ``max_iter`` or ``singular_shift``. ``outcome_step`` is the first
    collapsing step or the step whose solve failed.
    """
    steps: tuple[IterationStep, ...]
    outcome: str
    outcome_step: Optional[int]
    settled: bool
    method: str
    last_v: Vec = field(repr=False, default=None)

    @property
    def z_values(self) -> np.ndarray:
        """
        gets every recorded z
        """
        return np.array([s.z for s in self.steps])

    @property
    def final_z(self) -> float:
        """
        gets the last recorded z
        """
        return self.steps[-1].z

    @property
    def final_v(self) -> Vec:
        """
        gets the last iterate
        """
        return self.last_v

    @property
    def collapsed(self) -> bool:
        """
        some iterate had strictly mixed signs
        """
        return self.outcome == COLLAPSE

    @property
    def converged(self) -> bool:
        """
        z settled and nothing was flagged
        """
        return self.outcome == CONVERGED

    def check(self) -> "IterationTrace":
        """
        self, or the SingularShiftError that ended the run
        """
        if self.outcome == SINGULAR_SHIFT:
            s = self.outcome_step
            raise SingularShiftError(f"{self.method} hit a singular shift at step {s}", z=self.final_z, step=s)
        return self

    def to_jsonl(self) -> str:
        """
        one JSON object per step, ``{"k", "z", "residual", "flags"}``
        """
        return "\n".join(json.dumps(s.to_record()) for s in self.steps) + "\n"


class DenseOperator:
    """
    a dense matrix, shifted systems by pivoted LU
    """
    def __init__(self, M: Union[QMat, np.ndarray]) -> None:
        self.matrix = np.asarray(M, dtype=np.float64)

    def apply(self, v: Iterable[float]) -> Vec:
        return matvec(self.matrix, v)

    def solve(self, z: float, v: Iterable[float]) -> Vec:
        return dense_shifted_solve(self.matrix, z, v)


class TridiagonalOperator:
    """
    ``-Q`` of a TriQ, shifted systems by banded LU in O(N)
    """
    def __init__(self, T: TriQ) -> None:
        self.matrix = T

    def apply(self, v: Iterable[float]) -> Vec:
        return self.matrix.neg_matvec(v)

    def solve(self, z: float, v: Iterable[float]) -> Vec:
        try:
            w = sla.solve_banded((1, 1), self.matrix.banded(z), np.asarray(v, dtype=np.float64),
                                 check_finite=False)
        except np.linalg.LinAlgError as e:
            raise SingularShiftError(f"-Q - zI is singular at z = {z!r}", z=z) from e
        if not np.all(np.isfinite(w)):
            raise SingularShiftError(f"-Q - zI is singular at z = {z!r}", z=z)
        return Vec(w)


def as_operator(M: Matrix) -> Union[DenseOperator, TridiagonalOperator]:
    """
    wraps ``M``; a TriQ acts as its ``-Q``, anything else as itself
    """
    if isinstance(M, (DenseOperator, TridiagonalOperator)):
        return M
    if isinstance(M, TriQ):
        return TridiagonalOperator(M)
    return DenseOperator(M)


def _residual(op, v: Vec, z: float, opts: IterationOptions) -> float:
    return opts.norm_of(np.asarray(op.apply(v)) - z * np.asarray(v))


def _step_flags(v: Vec, opts: IterationOptions, extra: tuple[str, ...] = ()) -> tuple[str, ...]:
    flags = extra
    if opts.detect_collapse and v.has_mixed_signs():
        flags = flags + (FLAG_COLLAPSE, )
    return flags


def _close(steps: list[IterationStep], settled: bool, method: str, last_v: Vec,
           singular_at: Optional[int] = None) -> IterationTrace:
    collapsed = [s.k for s in steps if FLAG_COLLAPSE in s.flags]
    if singular_at is not None:
        outcome, at = SINGULAR_SHIFT, singular_at
    elif collapsed:
        outcome, at = COLLAPSE, collapsed[0]
    else:
        outcome, at = (CONVERGED if settled else MAX_ITER), None
    _log.debug("%s finished: %s after %d steps, z=%.12g", method, outcome, steps[-1].k, steps[-1].z)
    return IterationTrace(tuple(steps), outcome, at, settled, method, last_v)


def _settled(z_new: float, z_old: float, tol: float) -> bool:
    return abs(z_new - z_old) <= tol * max(1., abs(z_new))


def _aligned(v: Vec, prev: Vec) -> Vec:
    """
    ``v`` with the sign that keeps it on the side of ``prev``
    """
    return Vec(-np.asarray(v)) if float(np.asarray(v) @ np.asarray(prev)) < 0 else v


def power_iteration(A: Matrix, v0: Iterable[float], opts: Optional[IterationOptions] = None) -> IterationTrace:
    """
    power iteration ``v_k = A v_{k-1} / ||A v_{k-1}||``

    Records ``z_k = ||A v_k||`` in the configured norm and stops once
    ``|z_k - z_{k-1}| <= tol |z_k|``.

    Parameters
    ----------
        A : QMat | ndarray
            nonnegative irreducible matrix
        v0 : Iterable[float]
            positive starting vector, normalized here
        opts : IterationOptions, (optional)
            the norm, tolerances and iteration cap, 2000 steps by default

    Returns
    -------
        IterationTrace : the run
    """
    opts = opts or IterationOptions(max_iter=POWER_MAX_ITER)
    op = as_operator(A)
    v = opts.normalize(v0)
    if not v.is_positive():
        raise NonpositiveError("power iteration needs a positive starting vector")
    steps: list[IterationStep] = []
    z_old = None
    settled = False
    for k in range(opts.max_iter + 1):
        Av = op.apply(v)
        z = opts.norm_of(Av)
        steps.append(IterationStep(k, z, v if opts.track_vectors else None, _residual(op, v, z, opts),
                                   _step_flags(v, opts)))
        if z_old is not None and abs(z - z_old) <= opts.tol * abs(z):
            settled = True
            break
        if z == 0:
            break
        z_old = z
        v = Vec(np.asarray(Av) / z)
    return _close(steps, settled, "power", v)


def inverse_iteration(A: Matrix, z: float, v0: Iterable[float],
                      opts: Optional[IterationOptions] = None) -> IterationTrace:
    """
    fixed-shift inverse iteration ``v_k ∝ (A - zI)^-1 v_{k-1}``

    Each step records the Rayleigh quotient of ``v_k`` and the entrywise
    (min, max) of ``w_k / v_{k-1}``, which tend to ``1/(lambda - z)`` for the
    eigenvalue ``lambda`` nearest to ``z``.
    """
    opts = opts or IterationOptions()
    op = as_operator(A)
    v = opts.normalize(v0)
    zq = rayleigh_quotient(v, op.matrix, opts.weights)
    steps = [IterationStep(0, zq, v if opts.track_vectors else None, _residual(op, v, zq, opts),
                           _step_flags(v, opts))]
    settled = False
    for k in range(1, opts.max_iter + 1):
        try:
            w = op.solve(z, v)
        except SingularShiftError:
            return _close(steps, False, "inverse", v, singular_at=k)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.asarray(w) / np.asarray(v)
        ratio = (float(r.min()), float(r.max())) if np.all(np.isfinite(r)) else None
        v_new = _aligned(opts.normalize(w), v)
        zq_new = rayleigh_quotient(v_new, op.matrix, opts.weights)
        steps.append(IterationStep(k, zq_new, v_new if opts.track_vectors else None,
                                   _residual(op, v_new, zq_new, opts), _step_flags(v_new, opts), ratio))
        done = _settled(zq_new, zq, opts.tol)
        v, zq = v_new, zq_new
        if done:
            settled = True
            break
    return _close(steps, settled, "inverse", v)


def rqi(M: Matrix,
        init: InitialPair,
        mu: Optional[Measure] = None,
        opts: Optional[IterationOptions] = None,
        project: Optional[Callable[[Vec], Vec]] = None) -> IterationTrace:
    """
    Rayleigh quotient iteration ``(M - z_{k-1} I) w_k = v_{k-1}``

    ``v_k = w_k / ||w_k||`` and ``z_k = (v_k, M v_k)_mu / (v_k, v_k)_mu``.
    Step 0 records ``init.z0`` and counts as converged when the residual
    ``||M v_0 - z_0 v_0||`` is already below ``tol``. A singular solve is
    retried once with ``z`` moved by ``1e-12 (1 + |z|)``.

    Parameters
    ----------
        M : QMat | TriQ | ndarray
            the matrix, a TriQ stands for its ``-Q``
        init : InitialPair
            starting pair
        mu : Measure, (optional)
            switches to the weighted norm with these weights
        opts : IterationOptions, (optional)
            defaults to the norm and measure declared by ``init``
        project : Callable, (optional)
            map applied to every solve output before normalizing

    Returns
    -------
        IterationTrace : the run; a mixed-sign iterate sets the ``collapse``
        outcome but does not stop the run
    """
    if opts is None:
        opts = IterationOptions(norm=init.norm, mu=init.mu)
    if mu is not None:
        opts = replace(opts, norm=WEIGHTED, mu=mu)
    op = as_operator(M)
    v = opts.normalize(init.v0)
    z = float(init.z0)
    res = _residual(op, v, z, opts)
    steps = [IterationStep(0, z, v if opts.track_vectors else None, res, _step_flags(v, opts))]
    if res <= opts.tol * max(1., abs(z)):
        return _close(steps, True, "rqi", v)
    settled = False
    for k in range(1, opts.max_iter + 1):
        extra: tuple[str, ...] = ()
        try:
            w = op.solve(z, v)
        except SingularShiftError:
            try:
                w = op.solve(z + SHIFT_NUDGE * (1 + abs(z)), v)
                extra = (FLAG_NUDGED, )
            except SingularShiftError:
                return _close(steps, False, "rqi", v, singular_at=k)
        if project is not None:
            w = project(w)
        v_new = _aligned(opts.normalize(w), v)
        z_new = rayleigh_quotient(v_new, op.matrix, opts.weights)
        steps.append(IterationStep(k, z_new, v_new if opts.track_vectors else None,
                                   _residual(op, v_new, z_new, opts), _step_flags(v_new, opts, extra)))
        _log.debug("rqi step %d: z=%.12g", k, z_new)
        done = _settled(z_new, z, opts.tol)
        v, z = v_new, z_new
        if done:
            settled = True
            break
    return _close(steps, settled, "rqi", v)


def tridiag_solve_G(T: TriQ, z: float, v: Iterable[float]) -> Vec:
    """
    solves ``(-Q - zI) w = v`` through the G-recursion

    With ``b_N := c_N`` and for each ``i < N``

        alpha_l^(i) = (c_{i+l} - z + [l = 1] a_{i+l}) / b_{i+l}
        G_{l,1} = alpha_l^(i)
        G_{l,k} = G_{l,k-1} + alpha_{l-k+1}^(i+k-1) G_{k-1,k-1},   l = k..N-i

    then with ``G_{0,0} = 1``,
    ``N_n(h) = sum_{j<=n} h_j/b_j sum_{k<=n-j} G^(j)_{k,k}`` and
    ``M(h) = c_N sum_{j<N} h_j/b_j G^(j)_{N-j,N-j}``:

        w_n = (v_N + M(v)) / (c_N - z + M(c - z)) * (1 + N_{n-1}(c - z)) - N_{n-1}(v)

    Only the previous column ``G_{., k-1}`` is kept while recursing.

    Raises
    ------
        InvalidInputError : ``c_N = 0``
        SingularShiftError : the leading denominator vanishes
    """
    v = np.asarray(v, dtype=np.float64)
    N = T.N
    if v.shape != (N + 1, ):
        raise InvalidInputError(f"Expected a vector of length {N + 1}, got {v.shape}")
    cz = T.c - z
    if N == 0:
        if cz[0] == 0:
            raise SingularShiftError(f"c_0 - z vanishes at z = {z!r}", z=z)
        return Vec(v / cz[0])
    cN = T.c[N]
    if cN <= 0:
        raise InvalidInputError("the G-recursion needs c_N > 0")
    B = np.concatenate((T.b, [cN]))
    beta = cz / B
    gamma = np.concatenate(([0.], T.a)) / B

    # S[j, n] = sum_{k <= n-j} G^(j)_{k,k}, zero for n < j
    S = np.zeros((N, N))
    G_end = np.empty(N)
    for i in range(N):
        L = N - i
        col = np.zeros(L + 1)
        col[1:] = beta[i + 1:]
        col[1] += gamma[i + 1]
        d = np.empty(L + 1)
        d[0], d[1] = 1., col[1]
        for k in range(2, L + 1):
            pivot = col[k - 1]
            col[k:] += beta[i + k:] * pivot
            col[k] += gamma[i + k] * pivot
            d[k] = col[k]
        S[i, i:] = np.cumsum(d[:L])
        G_end[i] = d[L]

    def n_term(h: np.ndarray) -> np.ndarray:
        # N_{n-1}(h) for n = 0..N
        return np.concatenate(([0.], (h[:N] / T.b) @ S))

    def m_term(h: np.ndarray) -> float:
        return float(cN * np.sum(h[:N] / T.b * G_end))

    den = cN - z + m_term(cz)
    if den == 0 or not np.isfinite(den):
        raise SingularShiftError(f"G-recursion denominator vanishes at z = {z!r}", z=z)
    w0 = (v[N] + m_term(v)) / den
    return Vec(w0 * (1 + n_term(cz)) - n_term(v))


def ii_operator(T: TriQ, f: Iterable[float]) -> Vec:
    """
    the operator ``II(f)(i) = (1/f_i) sum_{j>=i} 1/(mu_j b_j) sum_{k<=j} mu_k f_k``

    Defined for birth-death matrices killed at ``N`` only, where
    ``b_N := c_N``. ``f II(f) = (-Q)^-1 f``, so iterating
    ``f_{n+1} = f_n II(f_n)`` is inverse iteration at ``z = 0``.

    Raises
    ------
        InvalidInputError : killing away from ``N`` or no killing
        NonpositiveError : ``f`` not strictly positive
    """
    if not T.is_case1 or T.c[-1] <= 0:
        raise InvalidInputError("II needs killing at N only (c_0 = ... = c_{N-1} = 0 < c_N)")
    f = Vec(f)
    if f.size != T.size:
        raise InvalidInputError(f"Expected a vector of length {T.size}, got {f.size}")
    if not f.is_positive():
        raise NonpositiveError("II needs a strictly positive f")
    mu = mu_sequence(T).weights
    b = np.concatenate((T.b, [T.c[-1]]))
    inner = np.cumsum(mu * np.asarray(f))
    outer = np.cumsum((inner / (mu * b))[::-1])[::-1]
    return Vec(outer / np.asarray(f))


@dataclass(frozen=True)
class IIReport:
    """
    ``bounds[n]`` is (min, max) of ``II(f_n)``; ``violations`` lists the ``n``
    where the max grew or the min shrank
    """
    bounds: tuple[tuple[float, float], ...]
    violations: tuple[int, ...]


def ii_iteration(T: TriQ, f: Iterable[float], steps: int = 50) -> IIReport:
    """
    iterates ``f_{n+1} = f_n II(f_n)`` and reports the (min, max) of ``II(f_n)``
    """
    f = Vec(f)
    bounds: list[tuple[float, float]] = []
    violations: list[int] = []
    for n in range(steps + 1):
        g = ii_operator(T, f)
        lo, hi = float(g.min()), float(g.max())
        if bounds and (hi > bounds[-1][1] * (1 + 1e-14) or lo < bounds[-1][0] * (1 - 1e-14)):
            violations.append(n)
        bounds.append((lo, hi))
        f = Vec(np.asarray(f) * np.asarray(g))
        f = Vec(np.asarray(f) / float(np.max(f)))
    if violations:
        _log.info("II iteration: monotonicity broken at %s", violations)
    return IIReport(tuple(bounds), tuple(violations))
