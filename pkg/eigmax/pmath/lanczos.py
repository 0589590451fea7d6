from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from ..data.constants import BREAKDOWN_TOL
from ..data.errorhandler import BreakdownError, InvalidInputError, get_logger, warn
from .linalg import QMat, TriQ, Vec, _square

__all__ = ["LanczosResult", "lanczos_tridiagonalize"]

_log = get_logger("lanczos")


@dataclass(frozen=True, eq=False)
class LanczosResult:
    """
    LanczosResult
    =============
    Output of the two-sided Lanczos recurrence, ``A Q = Q T``.

    Parameters
    ----------
        diag : ndarray
            ``c_k``, diagonal of T
        sub : ndarray
            ``b_k = ||r_k||``, placed at ``T[k+1, k]``
        sup : ndarray
            ``a_k = r~_k* r_k / b_k``, placed at ``T[k, k+1]``
        basis : ndarray
            the columns ``q_k``
        dual : ndarray
            the columns ``q~_k``, with ``dual* basis = I``
        breakdown_at : int | None
            index ``k`` at which ``b_k`` or ``a_k`` vanished, None if complete
    """
    diag: np.ndarray
    sub: np.ndarray
    sup: np.ndarray
    basis: np.ndarray
    dual: np.ndarray
    breakdown_at: Optional[int] = None

    @property
    def T(self) -> np.ndarray:
        """
        the tridiagonal matrix built from the completed steps
        """
        k = self.diag.size
        t = np.diag(self.diag)
        if k > 1:
            t += np.diag(self.sub[:k - 1], -1) + np.diag(self.sup[:k - 1], 1)
        return t

    @property
    def complete(self) -> bool:
        """
        all steps ran without breakdown
        """
        return self.breakdown_at is None

    @property
    def eligible(self) -> bool:
        """
        complete and every off-diagonal entry is positive
        """
        return self.complete and bool(np.all(self.sub > 0) and np.all(self.sup > 0))

    def require_complete(self) -> "LanczosResult":
        """
        self, or BreakdownError if the recurrence broke down
        """
        if not self.complete:
            raise BreakdownError(f"two-sided Lanczos broke down at step {self.breakdown_at}")
        return self

    def to_triq(self) -> tuple[TriQ, float]:
        """
        T read as ``Q + mI`` for the tridiagonal initials

        Raises
        ------
            BreakdownError : incomplete run
            InvalidInputError : some off-diagonal entry of T is not positive
        """
        self.require_complete()
        if not self.eligible:
            raise InvalidInputError("T has nonpositive off-diagonal entries, not a birth-death shape")
        return TriQ.from_tridiagonal(self.T)


def lanczos_tridiagonalize(A: Union[QMat, np.ndarray, Iterable],
                           q1: Optional[Iterable[float]] = None,
                           qt1: Optional[Iterable[float]] = None) -> LanczosResult:
    """
    two-sided Lanczos tridiagonalization ``T = Q^-1 A Q``

    Runs

        c_k = q~_k* A q_k
        r_k = (A - c_k) q_k - a_{k-1} q_{k-1}
        r~_k = (A - c_k)* q~_k - b_{k-1} q~_{k-1}
        b_k = ||r_k||,  a_k = r~_k* r_k / b_k
        q_{k+1} = r_k / b_k,  q~_{k+1} = r~_k / a_k

    Breakdown is reported with a warning, never repaired.

    Parameters
    ----------
        A : QMat | array-like
            square matrix
        q1 : Iterable[float], (optional)
            first right vector, defaults to ``e_0``
        qt1 : Iterable[float], (optional)
            first left vector, defaults to ``q1``; ``qt1* q1`` must be 1

    Returns
    -------
        LanczosResult : the recurrence coefficients and bases
    """
    a = _square(A)
    n = a.shape[0]
    q = np.asarray(Vec.basis(n, 0) if q1 is None else Vec(q1))
    qt = q.copy() if qt1 is None else np.asarray(Vec(qt1))
    if q.size != n or qt.size != n:
        raise InvalidInputError(f"Expected starting vectors of length {n}")
    if abs(float(qt @ q) - 1) > 1e-10:
        raise InvalidInputError("starting vectors must satisfy qt1* q1 = 1")

    tol = BREAKDOWN_TOL * float(np.max(np.sum(np.abs(a), axis=1)))
    basis = np.zeros((n, n))
    dual = np.zeros((n, n))
    diag, sub, sup = [], [], []
    q_prev = np.zeros(n)
    qt_prev = np.zeros(n)
    breakdown = None
    for k in range(n):
        basis[:, k] = q
        dual[:, k] = qt
        ck = float(qt @ a @ q)
        diag.append(ck)
        if k == n - 1:
            break
        r = a @ q - ck * q - (sup[-1] * q_prev if sup else 0.)
        rt = a.T @ qt - ck * qt - (sub[-1] * qt_prev if sub else 0.)
        bk = float(np.linalg.norm(r))
        if bk < tol:
            breakdown = k
            break
        ak = float(rt @ r) / bk
        if abs(ak) < tol:
            breakdown = k
            break
        sub.append(bk)
        sup.append(ak)
        q_prev, qt_prev = q, qt
        q, qt = r / bk, rt / ak
        _log.debug("step %d: c=%g b=%g a=%g", k, ck, bk, ak)

    m = len(diag)
    result = LanczosResult(np.array(diag), np.array(sub), np.array(sup), basis[:, :m], dual[:, :m], breakdown)
    if breakdown is not None:
        warn(f"WARNING [lanczos] : breakdown at step {breakdown}, T covers {m} of {n} states")
    elif not result.eligible:
        warn("WARNING [lanczos] : T has nonpositive off-diagonal entries, ineligible for the tridiagonal initials")
    return result
