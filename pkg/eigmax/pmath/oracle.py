from typing import Iterable, Union

import numpy as np
import scipy.linalg as sla

from ..data.constants import ORACLE_MAX_SIZE
from ..data.errorhandler import OracleSizeError
from .linalg import QMat, Spectrum, TriQ, Vec, _square

__all__ = ["eigen_oracle", "perron_pair"]


def _dense(M: Union[QMat, TriQ, np.ndarray, Iterable]) -> np.ndarray:
    if isinstance(M, TriQ):
        M = M.to_qmat().negated()
    a = _square(M)
    if a.shape[0] > ORACLE_MAX_SIZE:
        raise OracleSizeError(f"oracle is limited to {ORACLE_MAX_SIZE} states, got {a.shape[0]}")
    return a


def eigen_oracle(M: Union[QMat, TriQ, np.ndarray, Iterable]) -> Spectrum:
    """
    full spectrum by LAPACK QR on a Hessenberg reduction

    Independent of every iteration engine, used to cross-check them.
    A TriQ stands for its ``-Q``.

    Raises
    ------
        OracleSizeError : more than ``ORACLE_MAX_SIZE`` states
    """
    h = sla.hessenberg(_dense(M))
    return Spectrum(sla.eigvals(h))


def perron_pair(M: Union[QMat, TriQ, np.ndarray, Iterable], smallest: bool = False) -> tuple[float, Vec]:
    """
    the eigenvalue of largest (or smallest) real part and its eigenvector

    Returns
    -------
        tuple[float, Vec] : the eigenvalue and an ℓ²-unit eigenvector with its
        largest-magnitude component positive
    """
    w, V = sla.eig(_dense(M))
    i = int(np.argmin(w.real) if smallest else np.argmax(w.real))
    v = Vec(np.real(V[:, i]))
    return float(w[i].real), v.normalized().oriented()
