from typing import Iterable, Optional

import numpy as np

from ..data.errorhandler import DimensionMismatchError, InvalidInputError
from ..pmath.linalg import TriQ

__all__ = ["FAMILIES", "generate_family"]

QUADRATIC_BD = "quadratic_bd"
CUSTOM_BD = "custom_bd"
FAMILIES = (QUADRATIC_BD, CUSTOM_BD)


def generate_family(name: str,
                    N: int,
                    a: Optional[Iterable[float]] = None,
                    b: Optional[Iterable[float]] = None,
                    c_N: Optional[float] = None) -> TriQ:
    """
    birth-death test matrices on ``0..N`` killed at ``N``

    ``quadratic_bd`` has ``a_i = i^2``, ``b_i = (i + 1)^2`` and
    ``c_N = (N + 1)^2``. ``custom_bd`` takes the rates ``a_1..a_N``,
    ``b_0..b_{N-1}`` and the killing ``c_N``.

    Examples
    --------
        >>> T = generate_family("quadratic_bd", 1)
        >>> T.to_qmat().entries
        array([[-1.,  1.],
               [ 1., -5.]])
    """
    if N < 1:
        raise InvalidInputError(f"Expected N >= 1, got {N}")
    c = np.zeros(N + 1)
    if name == QUADRATIC_BD:
        i = np.arange(1, N + 1, dtype=np.float64)
        c[N] = (N + 1)**2
        return TriQ(i**2, i**2, c)
    if name == CUSTOM_BD:
        if a is None or b is None or c_N is None:
            raise InvalidInputError("custom_bd needs a, b and c_N")
        a = np.asarray(list(a), dtype=np.float64)
        b = np.asarray(list(b), dtype=np.float64)
        if a.size != N or b.size != N:
            raise DimensionMismatchError(f"Expected {N} rates a and b, got {a.size} and {b.size}")
        c[N] = c_N
        return TriQ(a, b, c)
    raise InvalidInputError(f"Expected a family in {FAMILIES}, got {name!r}")
