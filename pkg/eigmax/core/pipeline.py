from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

import numpy as np

from ..data.constants import (AUTO, COMBO, CONVERGED, DEFAULT_XI, DENSE_MAX_SIZE, KILL_FACTOR, KILLED,
                              NEXT_VARIANTS, NEXT_XI, R_GRID, SCAN, SKIP_THRESHOLD, TRIVIAL)
from ..data.errorhandler import InvalidInputError, get_logger, warn
from ..pmath.lanczos import lanczos_tridiagonalize
from ..pmath.linalg import QMat, TriQ, Vec, constant_row_sum, shift_to_q
from .general import initials_choice3, initials_general, initials_uniform
from .iteration import IterationOptions, IterationStep, IterationTrace, rqi
from .nexteig import initials_next_general, initials_next_tridiagonal, rqi_next
from .tridiagonal import InitialPair, initials_tridiagonal

__all__ = ["STRATEGIES", "SolveResult", "solve_maximal", "solve_next"]

_log = get_logger("pipeline")

TRIDIAG = "tridiag"
GENERAL_STRATEGY = "general"
UNIFORM_I_STRATEGY = "uniform-I"
UNIFORM_II_STRATEGY = "uniform-II"
CHOICE_III_STRATEGY = "choice-III"
LANCZOS = "lanczos"
STRATEGIES = (TRIDIAG, GENERAL_STRATEGY, UNIFORM_I_STRATEGY, UNIFORM_II_STRATEGY, CHOICE_III_STRATEGY, LANCZOS)

MatrixLike = Union[QMat, TriQ, np.ndarray, Iterable]


@dataclass(frozen=True, eq=False)
class SolveResult:
    """
    SolveResult
    ===========
    An eigenpair found by RQI together with the run that produced it.

    ``z`` is the eigenvalue of ``-Q`` the iteration converged to and
    ``value = shift - z`` the eigenvalue of the input. ``vector`` is
    ℓ²-normalized with its largest component positive.
    """
    value: float
    z: float
    vector: Vec
    trace: IterationTrace
    initial: InitialPair
    shift: float
    strategy: str

    @property
    def outcome(self) -> str:
        return self.trace.outcome

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "value": self.value,
            "z": self.z,
            "shift": self.shift,
            "outcome": self.outcome,
            "steps": len(self.trace.steps) - 1,
            "z_values": self.trace.z_values.tolist(),
            "vector": np.asarray(self.vector).tolist(),
        }


def _trivial(A: QMat, s: float) -> SolveResult:
    warn("WARNING [pipeline] : constant row sums, the maximal eigenpair is trivial")
    v = Vec.uniform(A.size)
    _, m = shift_to_q(A)
    init = InitialPair(v, m - s, TRIVIAL, shift=m, details={"trivial": True})
    trace = IterationTrace((IterationStep(0, m - s, v, 0.), ), CONVERGED, None, True, "trivial", v)
    return SolveResult(s, m - s, v, trace, init, m, TRIVIAL)


def _finish(M, init: InitialPair, opts: IterationOptions, strategy: str, basis: Optional[np.ndarray] = None,
            runner=None) -> SolveResult:
    trace = (runner or rqi)(M, init, opts=opts)
    v = np.asarray(trace.final_v)
    if basis is not None:
        v = basis @ v
    vector = Vec(v).normalized().oriented()
    z = trace.final_z
    _log.info("%s: %s after %d steps, value=%.12g", strategy, trace.outcome, len(trace.steps) - 1, init.shift - z)
    return SolveResult(init.shift - z, z, vector, trace, init, init.shift, strategy)


def _options(init: InitialPair, norm: Optional[str], opts: Optional[IterationOptions]) -> IterationOptions:
    opts = opts or IterationOptions()
    return replace(opts, norm=norm or init.norm, mu=init.mu)


def solve_maximal(A: MatrixLike,
                  strategy: str = GENERAL_STRATEGY,
                  xi: Union[float, str, None] = None,
                  anchor: Union[int, str] = 0,
                  skip_threshold: Optional[float] = SKIP_THRESHOLD,
                  symmetrize: bool = True,
                  z0: Optional[float] = None,
                  norm: Optional[str] = None,
                  opts: Optional[IterationOptions] = None) -> SolveResult:
    """
    maximal eigenpair of a matrix with nonnegative off-diagonals

    ``A`` is shifted into ``Q = A - mI``, an initial pair is built by
    ``strategy`` and RQI runs on ``-Q``; the result is read back on the
    side of ``A``. A TriQ input is taken as the Q-matrix itself (``m = 0``).

    Parameters
    ----------
        A : QMat | TriQ | array-like
            the matrix
        strategy : str, (optional)
            ``tridiag``, ``general``, ``uniform-I``, ``uniform-II``,
            ``choice-III`` or ``lanczos``
            defaults to ``general``
        xi : float | str, (optional)
            combination parameter of the tridiagonal (default 7/8) and general
            (default ``"auto"``) initials
        anchor : int | str, (optional)
            anchor of the general initials
        skip_threshold : float | None, (optional)
            threshold of the jump rule in the general initials
        symmetrize : bool, (optional)
            ``choice-III`` compares with the tridiagonal part of ``(A + A*)/2``
        z0 : float, (optional)
            upper bound of ``rho(A)`` used by ``uniform-I``; with ``general``
            it replaces the computed start, read on the side of ``A``
        norm : str, (optional)
            overrides the norm declared by the initial pair
        opts : IterationOptions, (optional)
            tolerances and iteration cap

    Returns
    -------
        SolveResult : the eigenpair and its trace
    """
    if strategy not in STRATEGIES:
        raise InvalidInputError(f"Expected a strategy in {STRATEGIES}, got {strategy!r}")

    if isinstance(A, TriQ):
        if strategy != TRIDIAG:
            A = A.to_qmat()
        else:
            init = initials_tridiagonal(A, DEFAULT_XI if xi is None else xi)
            return _finish(A, init, _options(init, norm, opts), strategy)

    A = A if isinstance(A, QMat) else QMat(A)
    s = constant_row_sum(A)
    if s is not None:
        return _trivial(A, s)
    if strategy != TRIDIAG and A.size > DENSE_MAX_SIZE:
        raise InvalidInputError(f"dense strategies are limited to {DENSE_MAX_SIZE} states, got {A.size}")

    if strategy == TRIDIAG:
        T, m = TriQ.from_tridiagonal(A.entries)
        init = replace(initials_tridiagonal(T, DEFAULT_XI if xi is None else xi), shift=m)
        return _finish(T, init, _options(init, norm, opts), strategy)

    if strategy == LANCZOS:
        result = lanczos_tridiagonalize(A)
        T, m = result.to_triq()
        init = replace(initials_tridiagonal(T, DEFAULT_XI if xi is None else xi), shift=m)
        return _finish(T, init, _options(init, norm, opts), strategy, basis=result.basis)

    if strategy == GENERAL_STRATEGY:
        init = initials_general(A, AUTO if xi is None else xi, anchor, skip_threshold)
        if z0 is not None:
            init = replace(init, z0=init.shift - z0, details={**init.details, "z0_override": z0})
    elif strategy == UNIFORM_I_STRATEGY:
        init = initials_uniform(A, "I", z0)
    elif strategy == UNIFORM_II_STRATEGY:
        init = initials_uniform(A, "II")
    else:
        init = initials_choice3(A, symmetrize)
    negq = init.shift * np.eye(A.size) - A.entries
    return _finish(negq, init, _options(init, norm, opts), strategy)


def solve_next(Q: MatrixLike,
               variant: str = COMBO,
               xi: float = NEXT_XI,
               c: float = KILL_FACTOR,
               r_grid: int = R_GRID,
               reproject: bool = False,
               opts: Optional[IterationOptions] = None) -> SolveResult:
    """
    next-to-maximal eigenpair ``lambda_1`` of a conservative Q-matrix

    The tridiagonal variants ``617``, ``618`` and ``6181`` need a
    tridiagonal ``Q``; ``620`` and ``621`` take any conservative ``Q``.
    ``value`` is the eigenvalue of ``Q``, that is ``-lambda_1``.
    """
    if variant not in NEXT_VARIANTS:
        raise InvalidInputError(f"Expected a variant in {NEXT_VARIANTS}, got {variant!r}")
    opts = opts or IterationOptions()

    def runner(M, init, opts):
        return rqi_next(M, init, opts=opts, reproject=reproject)

    if variant in (SCAN, KILLED):
        q = Q.to_qmat() if isinstance(Q, TriQ) else (Q if isinstance(Q, QMat) else QMat(Q))
        init = initials_next_general(q, c, r_grid, variant)
        return _finish(q.entries, init, opts, f"next-{variant}", runner=runner)
    if isinstance(Q, TriQ):
        T = Q
    else:
        q = Q if isinstance(Q, QMat) else QMat(Q)
        T, _ = TriQ.from_tridiagonal(q.entries)
        if q.is_conservative:
            # rounding in the row sums would leave spurious killing
            T = TriQ(T.a, T.b, np.zeros(T.size))
    init = initials_next_tridiagonal(T, variant, xi)
    return _finish(T, init, opts, f"next-{variant}", runner=runner)
