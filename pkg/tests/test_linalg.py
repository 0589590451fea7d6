import numpy as np
import pytest

from eigmax.data.constants import INVALID, NONNEGATIVE, Q_MATRIX, SHIFTABLE
from eigmax.data.errorhandler import (DimensionMismatchError, InvalidInputError, NonpositiveError, OracleSizeError,
                                      SingularShiftError)
from eigmax.pmath.linalg import (Measure, QMat, TriQ, Vec, constant_row_sum, dense_shifted_solve, rayleigh_quotient,
                                 shift_to_q, validate_q, weighted_inner_product)
from eigmax.pmath.oracle import eigen_oracle, perron_pair
from eigmax.core.tridiagonal import initials_tridiagonal


class TestVec:
    def test_norms(self):
        v = Vec([3, -4])
        assert v.norm() == 5.
        assert v.norm("l1") == 7.
        assert v.norm("weighted", Measure([1., 4.])) == pytest.approx(np.sqrt(9 + 64))

    def test_uniform_has_unit_norm(self):
        assert Vec.uniform(8).norm() == pytest.approx(1.)

    def test_rejects_bad_entries(self):
        with pytest.raises(InvalidInputError):
            Vec([])
        with pytest.raises(InvalidInputError):
            Vec([1., np.nan])
        with pytest.raises(InvalidInputError):
            Vec([0., 0.]).normalized()
        with pytest.raises(InvalidInputError):
            Vec([1.]).norm("sup")

    def test_mixed_signs_ignores_rounding_noise(self):
        assert not Vec([1., -1e-14, 2.]).has_mixed_signs()
        assert Vec([1., -0.1, 2.]).has_mixed_signs()
        assert not Vec([-1., -2.]).has_mixed_signs()

    def test_oriented(self):
        np.testing.assert_array_equal(Vec([0.5, -2.]).oriented(), [-0.5, 2.])
        np.testing.assert_array_equal(Vec([0.5, 2.]).oriented(), [0.5, 2.])


class TestMeasure:
    def test_rejects_nonpositive(self):
        with pytest.raises(NonpositiveError):
            Measure([1., 0.])

    def test_probability_and_rescaling(self):
        mu = Measure([1., 3.])
        assert mu.as_probability().total == pytest.approx(1.)
        assert mu.scaled_to(1)[1] == 1.
        assert mu.scaled_to(1)[0] == pytest.approx(1 / 3)

    def test_inner_product_checks_lengths(self):
        with pytest.raises(DimensionMismatchError):
            weighted_inner_product([1., 2.], [1., 2., 3.])
        with pytest.raises(DimensionMismatchError):
            weighted_inner_product([1., 2.], [1., 2.], Measure([1., 2., 3.]))


class TestQMat:
    def test_rejects_negative_off_diagonal(self):
        with pytest.raises(InvalidInputError):
            QMat([[-1., -1.], [1., -1.]])

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            QMat([[1., 2., 3.]])

    def test_tags(self):
        Q = QMat([[-1, 1], [2, -3]])
        np.testing.assert_array_equal(Q.row_sums, [0., -1.])
        assert Q.is_q_matrix and Q.is_irreducible and not Q.is_conservative
        assert QMat([[-1, 1], [2, -2]]).is_conservative

    def test_reducible(self):
        assert not QMat([[-1., 1.], [0., -1.]]).is_irreducible

    def test_entries_are_read_only(self):
        Q = QMat([[-1, 1], [2, -3]])
        with pytest.raises(ValueError):
            Q.entries[0, 0] = 5.


@pytest.mark.parametrize("M, kind", [
    ([[-1., 1.], [2., -3.]], Q_MATRIX),
    ([[1., 2., 3.], [1., 2., 1.], [3., 2., 1.]], NONNEGATIVE),
    ([[-5., 1.], [1., 2.]], SHIFTABLE),
    ([[1., -1.], [1., 1.]], INVALID),
])
def test_validate_q(M, kind):
    c = validate_q(M)
    assert c.kind == kind
    assert c.seed == kind


def test_validate_q_reports_reducibility():
    c = validate_q([[-1., 1.], [0., -1.]])
    assert c.kind == Q_MATRIX and not c.irreducible
    assert c.seed == INVALID


class TestShift:
    def test_shift_of_a13(self, a13):
        Q, m = shift_to_q(a13)
        assert m == 58.
        np.testing.assert_array_equal(np.diag(Q.entries), [-57., -52., -47., -42.])

    def test_shift_of_a9(self, a9):
        Q, m = shift_to_q(a9)
        assert m == 6.
        np.testing.assert_array_equal(np.diag(Q.entries), [-5., -4., -5.])

    def test_q_matrix_is_left_alone(self):
        Q, m = shift_to_q([[-1., 1.], [2., -3.]])
        assert m == 0.
        np.testing.assert_array_equal(Q.entries, [[-1., 1.], [2., -3.]])

    def test_shift_identity(self, a13):
        Q, m = shift_to_q(a13)
        rho = eigen_oracle(a13).max_real
        lam0 = eigen_oracle(Q.negated()).min_real
        assert abs((m - rho) - lam0) <= 1e-8 * m

    def test_constant_row_sum(self, a9):
        assert constant_row_sum([[1., 2.], [2., 1.]]) == 3.
        assert constant_row_sum(a9) is None


class TestTriQ:
    def test_from_tridiagonal(self, a8):
        T, m = TriQ.from_tridiagonal(a8)
        assert m == pytest.approx(0.65)
        np.testing.assert_allclose(T.a, [0.14])
        np.testing.assert_allclose(T.b, [0.4])
        np.testing.assert_allclose(T.c, [0., 0.39], atol=1e-15)

    def test_from_tridiagonal_rejects_wide_band(self, a9):
        with pytest.raises(InvalidInputError):
            TriQ.from_tridiagonal(a9)

    def test_validation(self):
        with pytest.raises(DimensionMismatchError):
            TriQ([1., 2.], [1.], [0., 1.])
        with pytest.raises(NonpositiveError):
            TriQ([0.], [1.], [0., 1.])
        with pytest.raises(NonpositiveError):
            TriQ([1.], [1.], [-1., 1.])

    def test_neg_matvec_matches_dense(self, quad7, rng):
        v = rng.standard_normal(8)
        np.testing.assert_allclose(quad7.neg_matvec(v), -quad7.to_qmat().entries @ v, rtol=1e-14)

    def test_flags(self, quad7, conservative_five):
        assert quad7.is_case1 and not quad7.is_conservative
        assert conservative_five.is_conservative
        assert conservative_five.to_qmat().is_conservative

    def test_scaled(self, quad7):
        np.testing.assert_allclose(quad7.scaled(2.).to_qmat().entries, 2 * quad7.to_qmat().entries)
        with pytest.raises(NonpositiveError):
            quad7.scaled(0.)


class TestShiftedSolve:
    def test_diagonal(self):
        np.testing.assert_allclose(dense_shifted_solve(2 * np.eye(3), 0., [1., 2., 3.]), [0.5, 1., 1.5])

    def test_singular_shift(self):
        with pytest.raises(SingularShiftError) as e:
            dense_shifted_solve(np.diag([1., 2.]), 1., [1., 1.])
        assert e.value.z == 1.

    def test_residual(self, rng):
        M = rng.standard_normal((6, 6)) + 6 * np.eye(6)
        v = rng.standard_normal(6)
        w = dense_shifted_solve(M, 0.5, v)
        np.testing.assert_allclose((M - 0.5 * np.eye(6)) @ w, v, atol=1e-12)


class TestRayleighQuotient:
    def test_uniform_on_quadratic(self, quad7):
        assert rayleigh_quotient(Vec.uniform(8), quad7) == pytest.approx(8.)

    def test_initial_vector_on_q(self, quad7):
        v0 = initials_tridiagonal(quad7, "pure").v0
        assert rayleigh_quotient(v0, quad7.to_qmat().entries) == pytest.approx(-0.78458, abs=1e-5)

    def test_eigenvector(self, a9):
        rho, g = perron_pair(a9)
        assert rayleigh_quotient(g, a9) == pytest.approx(rho)

    def test_zero_vector(self, a9):
        with pytest.raises(InvalidInputError):
            rayleigh_quotient(np.zeros(3), a9)


class TestOracle:
    def test_complex_spectrum(self, a14):
        spec = eigen_oracle(a14)
        assert len(spec) == 4
        assert spec.max_real == pytest.approx(24.0293, abs=1e-4)
        ev = spec.eigenvalues
        assert ev[0].real == pytest.approx(24.0293, abs=1e-4)
        assert ev[1].real == pytest.approx(7.72254, abs=1e-5)
        np.testing.assert_allclose(sorted(ev[2:].imag), [-2.40522, 2.40522], atol=1e-5)
        np.testing.assert_allclose(ev[2:].real, [1.1241, 1.1241], atol=1e-4)

    def test_diagonal(self):
        np.testing.assert_allclose(eigen_oracle(np.diag([3., 1., 2.])).real_sorted(), [1., 2., 3.])

    def test_birth_death(self, conservative_five):
        np.testing.assert_allclose(eigen_oracle(conservative_five).real_sorted(),
                                   [0., 3.03673, 5.92951, 10.6857, 22.348], atol=1e-3)

    def test_size_cap(self):
        with pytest.raises(OracleSizeError):
            eigen_oracle(np.eye(65))

    def test_perron_pair(self, a9):
        rho, g = perron_pair(a9)
        assert rho == pytest.approx(3 + np.sqrt(5))
        assert g.is_positive()
        assert g.norm() == pytest.approx(1.)
