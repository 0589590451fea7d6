from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

import numpy as np

from ..data.constants import (COLLAPSE, COMBO, EPSILON, FLAG_ORTHOGONALITY, KILL_FACTOR, KILLED,
                              NEXT, NEXT_XI, ORACLE_MAX_SIZE, ORTHOGONALITY_TOL, QUOTIENT, R_GRID, SCAN,
                              SINGULAR_SHIFT, WEIGHTED)
from ..data.errorhandler import DegenerateError, InvalidInputError, get_logger, warn
from ..pmath.linalg import Measure, QMat, TriQ, Vec, weighted_inner_product, weighted_norm
from ..pmath.oracle import eigen_oracle
from .general import embedding_chain, solve_x, stationary_mu
from .iteration import IterationOptions, IterationTrace, inverse_iteration, rqi
from .tridiagonal import InitialPair, mu_sequence

__all__ = [
    "NextInitialContext",
    "epsilon1",
    "initials_next_tridiagonal",
    "initials_next_general",
    "rqi_next",
]

_log = get_logger("nexteig")


@dataclass(frozen=True, eq=False)
class NextInitialContext:
    """
    NextInitialContext
    ==================
    Quantities behind the initials of the next-to-maximal eigenpair.

    ``vbar`` is ``vt`` centered in L²(μ), ``(vbar, 1)_mu = 0``. The general
    construction also keeps the killed matrix ``Q1``, its factor ``c``, the
    hitting probabilities ``x`` and the scan resolution.
    """
    mu: Measure
    pi: Measure
    vt: Vec
    vbar: Vec
    phi: Optional[np.ndarray] = None
    Q1: Optional[QMat] = None
    c: Optional[float] = None
    x: Optional[Vec] = None
    r_grid: Optional[int] = None


def _centered(vt: np.ndarray, mu: Measure) -> np.ndarray:
    pi = mu.as_probability().weights
    return vt - float(pi @ vt)


def _tridiagonal_context(T: TriQ) -> NextInitialContext:
    if not T.is_conservative:
        raise InvalidInputError("next eigenpair needs a conservative matrix (c = 0)")
    if T.N < 1:
        raise InvalidInputError("next eigenpair needs at least two states")
    mu = mu_sequence(T)
    phi = np.concatenate(([0.], np.cumsum(1 / (mu.weights[:-1] * T.b))))
    vt = np.sqrt(phi)
    return NextInitialContext(mu, mu.as_probability(), Vec(vt), Vec(_centered(vt, mu)), phi)


def _epsilon1(T: TriQ, ctx: NextInitialContext) -> float:
    vt = np.asarray(ctx.vt)
    gaps = np.diff(vt)
    if np.any(gaps <= 0):
        raise DegenerateError("v~0 is not strictly increasing")
    mu = ctx.mu.weights
    tail = np.cumsum((mu * np.asarray(ctx.vbar))[::-1])[::-1][1:]
    return float(np.max(tail / (mu[:-1] * T.b * gaps)))


def epsilon1(T: TriQ) -> float:
    """
    ``max_{i<N} sum_{j>i} mu_j vbar_j / (mu_i b_i (v~_{i+1} - v~_i))``

    ``1/epsilon1`` is the ``618`` initial shift for ``lambda_1``.
    """
    return _epsilon1(T, _tridiagonal_context(T))


def initials_next_tridiagonal(T: TriQ, variant: str = COMBO, xi: float = NEXT_XI) -> InitialPair:
    """
    initial pair for ``lambda_1`` of a conservative birth-death matrix

    ``phi_n = sum_{j<n} 1/(mu_j b_j)``, ``v~0 = sqrt(phi)``,
    ``vbar0 = v~0 - pi v~0`` and ``v0 = vbar0 / ||vbar0||_mu``. The shift is

        617  : (vbar0, -Q v~0)_mu / ||vbar0||_mu^2
        618  : 1/epsilon1
        6181 : xi/epsilon1 + (1 - xi) * (617 value)

    Parameters
    ----------
        T : TriQ
            conservative tridiagonal matrix
        variant : str, (optional)
            ``"617"``, ``"618"`` or ``"6181"``
            defaults to ``"6181"``
        xi : float, (optional)
            defaults to 2/5
    """
    ctx = _tridiagonal_context(T)
    mu = ctx.mu
    vbar = np.asarray(ctx.vbar)
    nb = weighted_inner_product(vbar, vbar, mu)
    quotient = weighted_inner_product(vbar, T.neg_matvec(ctx.vt), mu) / nb
    eps = _epsilon1(T, ctx)
    if variant == QUOTIENT:
        z0 = quotient
    elif variant == EPSILON:
        z0 = 1 / eps
    elif variant == COMBO:
        if not 0 <= xi <= 1:
            raise InvalidInputError(f"Expected xi in [0, 1], got {xi}")
        z0 = xi / eps + (1 - xi) * quotient
    else:
        raise InvalidInputError(f"Expected a tridiagonal variant 617, 618 or 6181, got {variant!r}")
    v0 = Vec(vbar / np.sqrt(nb))
    details = {"variant": variant, "epsilon1": eps, "quotient": quotient, "context": ctx}
    return InitialPair(v0, z0, NEXT, WEIGHTED, mu, xi=xi if variant == COMBO else None, details=details)


def _check_dominance(Q: Union[QMat, TriQ]) -> None:
    """
    warns when ``lambda_1`` of ``-Q`` is not real and isolated, desk scale only
    """
    if Q.size > ORACLE_MAX_SIZE:
        return
    ev = eigen_oracle(Q if isinstance(Q, TriQ) else Q.negated()).eigenvalues
    ev = ev[np.argsort(ev.real)][1:]
    scale = max(1., float(np.max(np.abs(ev))))
    if abs(ev[0].imag) > 1e-8 * scale or (ev.size > 1 and ev[1].real <= ev[0].real + 1e-10 * scale):
        warn("WARNING [nexteig] : lambda_1 is not a simple real eigenvalue, convergence is not guaranteed")


def _lambda0(M: np.ndarray) -> float:
    """
    smallest eigenvalue of ``M`` by inverse iteration at 0 polished by RQI
    """
    n = M.shape[0]
    coarse = inverse_iteration(M, 0., np.ones(n), IterationOptions(tol=1e-8, max_iter=500,
                                                                   track_vectors=False)).check()
    start = InitialPair(coarse.final_v, coarse.final_z, "inverse")
    return rqi(M, start, opts=IterationOptions(track_vectors=False)).check().final_z


def initials_next_general(Q: Union[QMat, np.ndarray, Iterable],
                          c: float = KILL_FACTOR,
                          r_grid: int = R_GRID,
                          variant: str = SCAN) -> InitialPair:
    """
    initial pair for ``lambda_1`` of a general conservative Q-matrix

    ``Q1`` is ``Q`` with ``q_NN`` replaced by ``c q_NN``; ``x`` are the
    hitting probabilities of state 0 in the embedding chain of ``Q1`` and
    ``mu`` the stationary measure of ``Q``. For ``r`` on a uniform grid of
    [0, 1], ``v~0(r) = (r, sqrt(1 - x_1), ..., sqrt(1 - x_N))`` is centered
    and ``z0(r) = (vbar0, -Q v~0)_mu / ||vbar0||_mu^2``. The minimizing ``r0``
    (lowest on ties) gives ``v0``; variant ``620`` keeps ``z0(r0)``,
    variant ``621`` replaces it by ``lambda_0(-Q1)``.

    Raises
    ------
        DegenerateError : ``z0(r)`` undefined on the whole grid
    """
    Q = Q if isinstance(Q, QMat) else QMat(Q)
    if not Q.is_conservative:
        raise InvalidInputError("next eigenpair needs a conservative Q-matrix")
    if Q.size < 2:
        raise InvalidInputError("next eigenpair needs at least two states")
    if not c > 1:
        raise InvalidInputError(f"Expected c > 1, got {c}")
    if r_grid < 2:
        raise InvalidInputError(f"Expected at least two grid points, got {r_grid}")
    if variant not in (SCAN, KILLED):
        raise InvalidInputError(f"Expected a general variant 620 or 621, got {variant!r}")
    _check_dominance(Q)

    q1 = np.array(Q.entries)
    q1[-1, -1] *= c
    Q1 = QMat(q1)
    x = solve_x(embedding_chain(Q1))
    mu = stationary_mu(Q)
    w = mu.weights
    negq = Q.negated()

    # v~0(r) = r e0 + t, everything below is affine in r
    t = np.concatenate(([0.], np.sqrt(np.clip(1 - np.asarray(x)[1:], 0., None))))
    e0 = np.zeros(Q.size)
    e0[0] = 1.
    e_bar, t_bar = _centered(e0, mu), _centered(t, mu)
    Qe, Qt = negq @ e0, negq @ t
    r = np.linspace(0., 1., r_grid)
    vb = r[:, None] * e_bar + t_bar
    num = (vb * w) @ Qt + r * ((vb * w) @ Qe)
    den = np.sum(vb * vb * w, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(den > 0, num / den, np.inf)
    if not np.any(np.isfinite(z)):
        raise DegenerateError("z0(r) is undefined on the whole grid")
    best = int(np.argmin(z))
    r0 = float(r[best])
    v0 = Vec(vb[best] / np.sqrt(den[best]))
    z0 = float(z[best])
    ctx = NextInitialContext(mu, mu.as_probability(), Vec(r0 * e0 + t), Vec(vb[best]), Q1=Q1, c=c, x=x,
                             r_grid=r_grid)
    details = {"variant": variant, "scan_z0": z0, "context": ctx}
    if variant == KILLED:
        z0 = _lambda0(Q1.negated())
        details["lambda0_Q1"] = z0
    _log.info("next initials (%s): r0=%.3f z0=%.6g", variant, r0, z0)
    return InitialPair(v0, z0, NEXT, WEIGHTED, mu, r0=r0, details=details)


def rqi_next(Q: Union[QMat, TriQ, np.ndarray],
             init: InitialPair,
             mu: Optional[Measure] = None,
             opts: Optional[IterationOptions] = None,
             reproject: bool = False) -> IterationTrace:
    """
    μ-weighted Rayleigh quotient iteration on ``-Q`` for ``lambda_1``

    Iterates stay centered, ``(v_k, 1)_mu = 0``, without projection; every
    step is checked and the ``orthogonality_lost`` flag marks drifts above
    ``1e-8 ||v_k||_mu``. With ``reproject`` each solve output is centered
    again before normalizing.

    Parameters
    ----------
        Q : QMat | TriQ | ndarray
            conservative Q-matrix
        init : InitialPair
            centered starting pair
        mu : Measure, (optional)
            defaults to ``init.mu``
        opts : IterationOptions, (optional)
            norm and measure are forced to ``weighted`` / ``mu``
        reproject : bool, (optional)
            defaults to False
    """
    mu = mu if mu is not None else init.mu
    if mu is None:
        raise InvalidInputError("rqi_next needs the stationary measure")
    mu = mu if isinstance(mu, Measure) else Measure(mu)
    if abs(weighted_inner_product(init.v0, np.ones(len(mu)), mu)) > 1e-10 * weighted_norm(init.v0, mu):
        raise InvalidInputError("initial vector is not centered, (v0, 1)_mu != 0")
    opts = replace(opts or IterationOptions(), norm=WEIGHTED, mu=mu, detect_collapse=False)
    M = Q if isinstance(Q, TriQ) else -np.asarray(Q, dtype=np.float64)
    project = (lambda w: Vec(_centered(np.asarray(w), mu))) if reproject else None
    trace = rqi(M, init, opts=opts, project=project)

    steps = []
    lost = []
    for s in trace.steps:
        if s.v is not None:
            drift = abs(weighted_inner_product(s.v, np.ones(len(mu)), mu))
            if drift > ORTHOGONALITY_TOL * weighted_norm(s.v, mu):
                s = replace(s, flags=s.flags + (FLAG_ORTHOGONALITY, ))
                lost.append(s.k)
        steps.append(s)
    if not lost or trace.outcome == SINGULAR_SHIFT:
        return replace(trace, steps=tuple(steps))
    warn(f"WARNING [nexteig] : iterates drifted toward the constant vector from step {lost[0]}")
    return replace(trace, steps=tuple(steps), outcome=COLLAPSE, outcome_step=lost[0])
