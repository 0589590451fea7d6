import numpy as np
import pytest

from eigmax.data.constants import L2, TRIDIAGONAL, WEIGHTED
from eigmax.data.errorhandler import InvalidInputError, NonpositiveError, TrivialSpectrumError
from eigmax.pmath.linalg import TriQ, Vec
from eigmax.pmath.oracle import eigen_oracle
from eigmax.core.tridiagonal import InitialPair, delta1, initials_tridiagonal, mu_sequence, phi_and_h


def test_mu_sequence(a8, conservative_five, quad7):
    T, _ = TriQ.from_tridiagonal(a8)
    np.testing.assert_allclose(mu_sequence(T).weights, [1., 20 / 7])
    np.testing.assert_allclose(mu_sequence(conservative_five).weights, [1., 5 / 3, 10 / 3, 1 / 3, 2 / 11])
    np.testing.assert_allclose(mu_sequence(quad7).weights, np.ones(8))


def test_mu_sequence_single_state():
    assert mu_sequence(TriQ([], [], [2.])).weights.tolist() == [1.]


class TestPhiAndH:
    def test_two_states(self, a8):
        T, _ = TriQ.from_tridiagonal(a8)
        seqs = phi_and_h(T)
        assert seqs.case == "case1"
        np.testing.assert_allclose(seqs.phi, [265 / 78, 35 / 39])
        np.testing.assert_array_equal(seqs.h[:-1], [1., 1.])
        assert seqs.h[-1] == pytest.approx(0.39)

    def test_single_state(self):
        seqs = phi_and_h(TriQ([], [], [1.]))
        np.testing.assert_allclose(seqs.phi, [1.])

    def test_quadratic_profile(self, quad7):
        s = np.sqrt(phi_and_h(quad7).phi)
        np.testing.assert_allclose(
            s / s[0], [1, 0.587624, 0.426178, 0.329975, 0.260701, 0.204394, 0.153593, 0.101142], atol=1e-6)

    def test_phi_decreasing_in_case1(self, quad7):
        assert np.all(np.diff(phi_and_h(quad7).phi) < 0)

    def test_second_case_reduces_to_first(self, quad7):
        first = phi_and_h(quad7)
        second = phi_and_h(quad7, case="case2")
        assert second.case == "case2"
        np.testing.assert_array_equal(second.r, np.ones(7))
        np.testing.assert_array_equal(second.h[:-1], np.ones(8))
        assert second.h[-1] == 64.
        np.testing.assert_allclose(second.phi, first.phi, rtol=1e-15)

    def test_second_case(self):
        T = TriQ([3., 2., 10., 11.], [5., 4., 1., 6.], [0.5, 0., 2., 0., 12.])
        seqs = phi_and_h(T)
        assert seqs.case == "case2"
        assert seqs.r[0] == pytest.approx(1.1)
        assert np.all(seqs.h > 0) and np.all(seqs.phi > 0)
        np.testing.assert_allclose(seqs.h[1:-1], np.cumprod(seqs.r))

    def test_nonpositive_closing_h(self):
        # killing at N is too weak to close the second case
        T = TriQ([3., 2.], [5., 4.], [2., 0., 0.])
        with pytest.raises(NonpositiveError):
            phi_and_h(T)

    def test_trivial(self, conservative_five):
        with pytest.raises(TrivialSpectrumError):
            phi_and_h(conservative_five)

    def test_unknown_case(self, quad7):
        with pytest.raises(InvalidInputError):
            phi_and_h(quad7, case="case3")


class TestDelta1:
    def test_quadratic(self, quad7):
        assert delta1(quad7) == pytest.approx(2.05768, abs=1e-5)
        assert 1 / delta1(quad7) == pytest.approx(0.485985, abs=1e-6)

    def test_two_states(self, a8):
        T, _ = TriQ.from_tridiagonal(a8)
        assert delta1(T) == pytest.approx(5 * (2809 + 40 * np.sqrt(742)) / 4134)

    def test_quadratic_hundred(self):
        i = np.arange(1., 100.)
        c = np.zeros(100)
        c[-1] = 100.**2
        assert 1 / delta1(TriQ(i**2, i**2, c)) == pytest.approx(0.348549, abs=1e-6)

    @pytest.mark.parametrize("c", [[0., 0., 0., 0., 1.], [0.5, 0., 2., 0., 12.], [0., 3., 0., 0., 40.]])
    def test_lower_bound(self, c):
        T = TriQ([3., 2., 10., 11.], [5., 4., 1., 6.], c)
        assert 1 / delta1(T) <= eigen_oracle(T).min_real * (1 + 1e-12)


class TestInitials:
    def test_pure(self, quad7):
        init = initials_tridiagonal(quad7, "pure")
        assert init.provenance == TRIDIAGONAL
        assert init.norm == L2
        assert init.z0 == pytest.approx(0.485985, abs=1e-6)
        assert init.v0.is_positive()
        assert init.details["case"] == "case1"

    def test_mixed(self, quad7):
        init = initials_tridiagonal(quad7)
        assert init.norm == WEIGHTED
        assert init.xi == 7 / 8
        assert init.z0 == pytest.approx(0.523309, abs=1e-6)
        assert init.v0.norm(WEIGHTED, init.mu) == pytest.approx(1.)

    def test_two_states_pure(self, a8):
        T, _ = TriQ.from_tridiagonal(a8)
        init = initials_tridiagonal(T, "pure")
        np.testing.assert_allclose(init.v0, [np.sqrt(53 / 67), np.sqrt(14 / 67)])

    @pytest.mark.parametrize("xi", [1.5, -0.1, "auto"])
    def test_rejects_xi(self, quad7, xi):
        with pytest.raises(InvalidInputError):
            initials_tridiagonal(quad7, xi)

    def test_scaling(self, quad7):
        init = initials_tridiagonal(quad7, "pure")
        scaled = initials_tridiagonal(quad7.scaled(3.), "pure")
        assert scaled.z0 == pytest.approx(3 * init.z0)
        np.testing.assert_allclose(scaled.v0, init.v0)


class TestInitialPair:
    def test_requires_unit_norm(self):
        with pytest.raises(InvalidInputError):
            InitialPair(Vec([1., 1.]), 0., "test")

    def test_requires_finite_shift(self):
        with pytest.raises(InvalidInputError):
            InitialPair(Vec.uniform(2), np.inf, "test")

    def test_matrix_side(self):
        init = InitialPair(Vec.uniform(2), 1.5, "test", shift=6.)
        assert init.matrix_side(init.z0) == 4.5
