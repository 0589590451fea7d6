from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from ..data.constants import CERTIFY_EPS, FLAG_NONPOSITIVE
from ..data.errorhandler import DegenerateError, InvalidInputError, NonpositiveError, get_logger, warn
from ..pmath.linalg import QMat, TriQ, Vec, matvec
from .iteration import IterationTrace
from .tridiagonal import mu_sequence

__all__ = ["BoundsPair", "collatz_wielandt", "ratio_certificate", "refined_birthdeath_bounds"]

_log = get_logger("bounds")

MATRIX_MODE = "matrix"
Q_MODE = "q"


@dataclass(frozen=True, eq=False)
class BoundsPair:
    """
    BoundsPair
    ==========
    Two-sided estimate ``lower <= eigenvalue <= upper`` produced by ``witness``.
    A pair flagged ``nonpositive`` certifies nothing and spans the real line.
    """
    lower: float
    upper: float
    witness: Vec
    step: Optional[int] = None
    flags: tuple[str, ...] = ()

    @property
    def ratio(self) -> float:
        """
        ``upper / lower``, inf when ``lower <= 0``
        """
        return self.upper / self.lower if self.lower > 0 else float("inf")

    @property
    def certified(self) -> bool:
        return FLAG_NONPOSITIVE not in self.flags

    def contains(self, value: float, rel: float = 0.) -> bool:
        """
        ``value`` lies in the interval, widened by ``rel`` relative slack
        """
        slack = rel * max(abs(self.lower), abs(self.upper)) if rel else 0.
        return self.lower - slack <= value <= self.upper + slack

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "ratio": self.ratio, "flags": list(self.flags)}


def collatz_wielandt(M: Union[QMat, TriQ, np.ndarray], x: Iterable[float], mode: str = MATRIX_MODE) -> BoundsPair:
    """
    Collatz–Wielandt bounds from a positive test vector

    In ``matrix`` mode ``min_i (Mx)_i/x_i <= rho(M) <= max_i (Mx)_i/x_i``;
    in ``q`` mode the same ratios of ``-Mx`` bracket ``lambda_0`` of the
    Q-matrix ``M``. A TriQ already stands for ``-Q`` and is only accepted
    in ``q`` mode.

    Raises
    ------
        NonpositiveError : ``x`` not strictly positive
    """
    x = Vec(x)
    if not x.is_positive():
        raise NonpositiveError("Collatz-Wielandt bounds need a strictly positive vector")
    if mode == Q_MODE:
        y = matvec(M, x) if isinstance(M, TriQ) else -np.asarray(matvec(M, x))
    elif mode == MATRIX_MODE:
        if isinstance(M, TriQ):
            raise InvalidInputError("a TriQ is a Q-matrix, use mode='q'")
        y = matvec(M, x)
    else:
        raise InvalidInputError(f"Expected mode {MATRIX_MODE!r} or {Q_MODE!r}, got {mode!r}")
    r = np.asarray(y) / np.asarray(x)
    return BoundsPair(float(r.min()), float(r.max()), x)


def ratio_certificate(M: Union[QMat, TriQ, np.ndarray], trace: IterationTrace, mode: str = Q_MODE) -> list[BoundsPair]:
    """
    Collatz–Wielandt bounds at every positive iterate of ``trace``

    Iterates are oriented first. A step with a component below ``1e-12`` of
    the largest one, or with mixed signs, yields the pair ``(-inf, inf)``
    flagged ``nonpositive``, so the result has one entry per step.

    Raises
    ------
        InvalidInputError : the trace kept no vectors
        DegenerateError : no step qualifies
    """
    if any(s.v is None for s in trace.steps):
        raise InvalidInputError("trace was recorded without vectors")
    out: list[BoundsPair] = []
    for s in trace.steps:
        v = s.v.oriented()
        arr = np.asarray(v)
        if np.any(arr <= CERTIFY_EPS * np.max(np.abs(arr))):
            _log.debug("step %d skipped: not positive", s.k)
            out.append(BoundsPair(-np.inf, np.inf, v, s.k, (FLAG_NONPOSITIVE, )))
            continue
        b = collatz_wielandt(M, arr, mode)
        out.append(BoundsPair(b.lower, b.upper, b.witness, s.k))
    if not any(b.certified for b in out):
        raise DegenerateError("no positive iterate available to certify")
    return out


def refined_birthdeath_bounds(T: TriQ, f: Iterable[float], z: Optional[float] = None) -> BoundsPair:
    """
    test-function bounds for birth-death matrices killed at ``N``

    With ``b_N := c_N``, ``phi_i = sum_{k>=i} 1/(mu_k b_k)`` and

        g_i = phi_i sum_{k<=i} mu_k f_k + sum_{k>i} mu_k phi_k f_k

    ``inf f/g <= lambda_0 <= min(z, sup f/g)``.

    A ``z`` below ``inf f/g`` is dropped with a warning. Within ``1e-12``
    relative of it the bracket closes on ``z``.

    Raises
    ------
        InvalidInputError : killing away from ``N``
        NonpositiveError : ``f`` not strictly positive, orient it first
    """
    if not T.is_case1 or T.c[-1] <= 0:
        raise InvalidInputError("refined bounds need killing at N only")
    f = Vec(f)
    if not f.is_positive():
        raise NonpositiveError("refined bounds need a strictly positive f")
    mu = mu_sequence(T).weights
    b = np.concatenate((T.b, [T.c[-1]]))
    fv = np.asarray(f)
    phi = np.cumsum((1 / (mu * b))[::-1])[::-1]
    prefix = np.cumsum(mu * fv)
    tail = mu * phi * fv
    suffix = np.concatenate((np.cumsum(tail[::-1])[::-1][1:], [0.]))
    r = fv / (phi * prefix + suffix)
    lower, upper = float(r.min()), float(r.max())
    if z is None:
        return BoundsPair(lower, upper, f)
    z = float(z)
    if z >= lower:
        upper = min(z, upper)
    elif lower - z <= CERTIFY_EPS * abs(lower):
        lower = upper = z
    else:
        warn(f"WARNING [bounds] : z = {z:.12g} lies below the lower bound {lower:.12g}, ignored")
    return BoundsPair(lower, upper, f)
