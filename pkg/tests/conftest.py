import os
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from eigmax.cli.families import generate_family
from eigmax.data import errorhandler
from eigmax.pmath.linalg import TriQ

settings.register_profile("eigmax", max_examples=200, deadline=None)
settings.register_profile("quick", max_examples=25, deadline=None)
settings.load_profile(os.environ.get("EIGMAX_HYPOTHESIS_PROFILE", "eigmax"))


@pytest.fixture(autouse=True)
def fresh_error_handler(monkeypatch):
    # no soft handler: every warning reaches warnings.warn
    monkeypatch.delattr(errorhandler, "err", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.environ.get("EIGMAX_SEED", "2014")))


@pytest.fixture
def quad7() -> TriQ:
    """
    a_i = i^2, b_i = (i + 1)^2 on 0..7, killed at 7 with c_7 = 64
    """
    return generate_family("quadratic_bd", 7)


@pytest.fixture
def a8() -> np.ndarray:
    return np.array([[25., 40.], [14., 12.]]) / 100


@pytest.fixture
def a9() -> np.ndarray:
    return np.array([[1., 2., 3.], [1., 2., 1.], [3., 2., 1.]])


@pytest.fixture
def a13() -> np.ndarray:
    return np.arange(1., 17.).reshape(4, 4)


@pytest.fixture
def a14() -> np.ndarray:
    return np.array([[1., 2., 0., 0.], [3., 14., 11., 0.], [9., 10., 11., 1.], [5., 6., 7., 8.]])


@pytest.fixture
def conservative_quadratic() -> TriQ:
    """
    a_i = b_{i-1} = i^2 on 0..7 without killing
    """
    i = np.arange(1., 8.)
    return TriQ(i**2, i**2, np.zeros(8))


@pytest.fixture
def conservative_five() -> TriQ:
    return TriQ([3., 2., 10., 11.], [5., 4., 1., 6.], np.zeros(5))


@pytest.fixture
def killed_five():
    """
    the five state chain with killing ``b`` at the last state, as a dense Q-matrix
    """
    def make(b: float) -> np.ndarray:
        return np.array([[-5., 5., 0., 0., 0.],
                         [3., -7., 4., 0., 0.],
                         [0., 2., -3., 1., 0.],
                         [0., 0., 10., -16., 6.],
                         [0., 0., 0., 11., -11. - b]])

    return make


@pytest.fixture
def killed_five_relabeled():
    """
    ``killed_five`` with the labels 0 and 2 exchanged
    """
    def make(b: float) -> np.ndarray:
        return np.array([[-3., 2., 0., 1., 0.],
                         [4., -7., 3., 0., 0.],
                         [0., 5., -5., 0., 0.],
                         [10., 0., 0., -16., 6.],
                         [0., 0., 0., 11., -11. - b]])

    return make


@pytest.fixture
def complex_pair_q() -> np.ndarray:
    """
    conservative, -Q has a complex pair above a real lambda_1
    """
    return np.array([[-30., 30., 0., 0.],
                     [1 / 5, -17., 84 / 5, 0.],
                     [11 / 28, 275 / 42, -20., 1097 / 84],
                     [55 / 3291, 330 / 1097, 588 / 1097, -2809 / 3291]])


@pytest.fixture
def dense_q() -> np.ndarray:
    """
    conservative with a dense pattern, -Q has real spectrum
    """
    return np.array([[-57., 118 / 27, 91 / 9, 1148 / 27],
                     [135 / 59, -52., 637 / 59, 2296 / 59],
                     [243 / 91, 590 / 91, -47., 492 / 13],
                     [351 / 287, 118 / 41, 195 / 41, -62 / 7]])


def _exact_shifted_solve(T: TriQ, z: float, v) -> np.ndarray:
    # Thomas sweep in rationals, every float input is taken exactly
    N = T.N
    a = [Fraction(0)] + [Fraction(float(x)) for x in T.a]
    b = [Fraction(float(x)) for x in T.b] + [Fraction(0)]
    c = [Fraction(float(x)) for x in T.c]
    z = Fraction(float(z))
    rhs = [Fraction(float(x)) for x in v]
    diag = [a[i] + b[i] + c[i] - z for i in range(N + 1)]
    cp, dp = [Fraction(0)] * (N + 1), [Fraction(0)] * (N + 1)
    cp[0], dp[0] = -b[0] / diag[0], rhs[0] / diag[0]
    for i in range(1, N + 1):
        m = diag[i] + a[i] * cp[i - 1]
        cp[i] = -b[i] / m
        dp[i] = (rhs[i] + a[i] * dp[i - 1]) / m
    w = [Fraction(0)] * (N + 1)
    w[N] = dp[N]
    for i in range(N - 1, -1, -1):
        w[i] = dp[i] - cp[i] * w[i + 1]
    return np.array([float(x) for x in w])


@pytest.fixture(scope="session")
def exact_shifted_solve():
    """
    ``(-Q - zI)^-1 v`` for a TriQ, computed in exact arithmetic
    """
    return _exact_shifted_solve
