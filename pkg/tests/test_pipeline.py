import numpy as np
import pytest

from eigmax.data.constants import COLLAPSE, CONVERGED, TRIVIAL
from eigmax.data.errorhandler import EigmaxWarning, InvalidInputError
from eigmax.pmath.oracle import perron_pair
from eigmax.core.pipeline import STRATEGIES, solve_maximal, solve_next

RHO_A9 = 3 + np.sqrt(5)
RHO_A13 = 36.209373
RHO_A14 = 24.029261


def matrix_side(result) -> np.ndarray:
    return result.shift - result.trace.z_values


class TestTridiagonal:
    def test_pure(self, a8):
        result = solve_maximal(a8, "tridiag", xi="pure")
        np.testing.assert_allclose(matrix_side(result)[:3], [0.437923, 0.430603, 0.430408], atol=1e-6)
        assert result.value == pytest.approx((37 + np.sqrt(2409)) / 200)
        assert result.outcome == CONVERGED

    def test_mixed(self, a8):
        result = solve_maximal(a8, "tridiag")
        np.testing.assert_allclose(matrix_side(result)[:3], [0.436733, 0.430407, 0.430408], atol=1e-6)

    def test_q_input(self, quad7):
        result = solve_maximal(quad7, "tridiag")
        assert result.shift == 0.
        assert result.value == pytest.approx(-0.5252679618)
        assert result.vector.is_positive()

    def test_q_input_general(self, quad7):
        result = solve_maximal(quad7, "general")
        np.testing.assert_allclose(result.trace.z_values[:3], [0.784580, 0.528215, 0.525268], atol=1e-6)

    @pytest.mark.parametrize("b, values", [
        (0.01, [0.000278670, 0.000278686, 0.000278686]),
        (1., [0.0244003, 0.0245190, 0.0245175]),
        (100., [0.179806, 0.182912, 0.182819]),
        (1e6, [0.191917, 0.195239, 0.195145]),
    ])
    def test_killing_at_last_state(self, killed_five, b, values):
        result = solve_maximal(killed_five(b), "tridiag", xi="pure")
        np.testing.assert_allclose(result.trace.z_values[:3], values, rtol=1e-5)

    def test_rejects_dense(self, a9):
        with pytest.raises(InvalidInputError):
            solve_maximal(a9, "tridiag")


class TestUniform:
    @pytest.mark.parametrize("fixture, values", [
        ("a9", [5.272727, 5.236393, 5.236068]),
        ("a13", [37.344191, 36.267421, 36.209461, RHO_A13]),
        ("a14", [24.439341, 24.038455, 24.029263, RHO_A14]),
    ])
    def test_choice_one(self, request, fixture, values):
        result = solve_maximal(request.getfixturevalue(fixture), "uniform-I")
        np.testing.assert_allclose(matrix_side(result)[1:len(values) + 1], values, atol=1e-6)

    def test_choice_one_with_bound(self, a9):
        result = solve_maximal(a9, "uniform-I", z0=200.)
        np.testing.assert_allclose(matrix_side(result)[1:5], [5.335459, 5.241821, 5.236075, 5.236068], atol=1e-6)

    @pytest.mark.parametrize("fixture, values", [
        ("a9", [16 / 3, 5.241830, 5.236075, 5.236068]),
        ("a13", [34., 35.842818, 36.212693, RHO_A13]),
        ("a14", [22., 23.731551, 24.031718, RHO_A14]),
    ])
    def test_choice_two(self, request, fixture, values):
        with pytest.warns(EigmaxWarning):
            result = solve_maximal(request.getfixturevalue(fixture), "uniform-II")
        np.testing.assert_allclose(matrix_side(result)[:4], values, atol=1e-6)

    def test_choice_three(self, a14):
        result = solve_maximal(a14, "choice-III")
        np.testing.assert_allclose(matrix_side(result)[:3], [24.022977, 24.028517, RHO_A14], atol=1e-6)


class TestGeneral:
    def test_auto(self, a9, a13):
        np.testing.assert_allclose(matrix_side(solve_maximal(a9))[:4], [5.116156, 5.238833, 5.236070, 5.236068],
                                   atol=1e-6)
        np.testing.assert_allclose(matrix_side(solve_maximal(a13))[:4], [34.492436, 36.146894, 36.209463, RHO_A13],
                                   atol=1e-6)

    def test_weighted_computed_start(self, a9, a13):
        np.testing.assert_allclose(matrix_side(solve_maximal(a9, xi=1 / 3))[:4],
                                   [5.343681, 5.232171, 5.236071, 5.236068], atol=1e-6)
        np.testing.assert_allclose(matrix_side(solve_maximal(a13, xi=1 / 3))[:4],
                                   [41.465713, 35.852919, 36.213068, RHO_A13], atol=1e-6)

    @pytest.mark.parametrize("fixture, xi, start, values", [
        ("a9", "pure", 5.90016, [5.222678, 5.236107, 5.236068]),
        ("a13", "pure", 57.2719, [36.236040, 36.209664, RHO_A13]),
        ("a14", "pure", 30.4808, [20.129465, 24.836148, 24.077803, 24.029407]),
        ("a9", 1 / 3, 5.04169, [5.243581, 5.236081, 5.236068]),
        ("a13", 1 / 3, 35.4952, [36.265732, 36.209465, RHO_A13]),
        ("a14", 0.65, 24.0344, [24.016173, 24.029271, RHO_A14]),
    ])
    def test_given_start(self, request, fixture, xi, start, values):
        result = solve_maximal(request.getfixturevalue(fixture), xi=xi, z0=start)
        assert result.initial.details["z0_override"] == start
        z = matrix_side(result)
        assert z[0] == pytest.approx(start)
        np.testing.assert_allclose(z[1:len(values) + 1], values, atol=1e-6)

    def test_given_start_keeps_the_vector(self, a9):
        plain = solve_maximal(a9, xi=1 / 3)
        moved = solve_maximal(a9, xi=1 / 3, z0=5.04169)
        np.testing.assert_array_equal(moved.initial.v0, plain.initial.v0)
        assert moved.initial.norm == plain.initial.norm
        assert moved.value == pytest.approx(plain.value)

    def test_collapse_on_a14(self, a14):
        result = solve_maximal(a14)
        np.testing.assert_allclose(result.initial.v0, [0.0659989, 0.217349, 0.290324, 0.929578], atol=1e-6)
        np.testing.assert_allclose(matrix_side(result)[:5], [13.753157, 7.109846, 7.608845, 7.721927, 7.722536],
                                   atol=1e-6)
        assert result.outcome == COLLAPSE
        assert result.value < RHO_A14

    def test_vector(self, a9):
        result = solve_maximal(a9)
        _, g = perron_pair(a9)
        np.testing.assert_allclose(result.vector, g, atol=1e-8)
        assert result.value == pytest.approx(RHO_A9)

    @pytest.mark.parametrize("b, values", [
        (0.01, [0.00118083, 0.000278548, 0.000278686]),
        (1., [0.109104, 0.0234222, 0.0245174]),
        (100., [1.55017, 0.133420, 0.182541, 0.182819]),
        (1e6, [2.27127, 0.111349, 0.194153, 0.195145]),
    ])
    def test_killing_at_last_state(self, killed_five, b, values):
        result = solve_maximal(killed_five(b), skip_threshold=None)
        np.testing.assert_allclose(result.trace.z_values[:len(values)], values, rtol=1e-5)

    @pytest.mark.parametrize("b, values", [
        (0.01, [0.00105387, 0.000278573, 0.000278686]),
        (1., [0.0990974, 0.0236258, 0.0245174]),
        (100., [1.66691, 0.200058, 0.182609, 0.182819]),
        (1e6, [2.52235, 0.360453, 0.187652, 0.195127]),
    ])
    def test_relabeled(self, killed_five_relabeled, b, values):
        result = solve_maximal(killed_five_relabeled(b), skip_threshold=None)
        np.testing.assert_allclose(result.trace.z_values[:len(values)], values, rtol=1e-5)

    def test_anchor_follows_labels(self, killed_five, killed_five_relabeled):
        moved = solve_maximal(killed_five_relabeled(1.), anchor=2, skip_threshold=None)
        plain = solve_maximal(killed_five(1.), skip_threshold=None)
        np.testing.assert_allclose(moved.trace.z_values[:3], plain.trace.z_values[:3], rtol=1e-10)


class TestLanczos:
    def test_pure(self, a9):
        result = solve_maximal(a9, "lanczos", xi="pure")
        np.testing.assert_allclose(matrix_side(result)[:4], [5.439368, 5.239962, 5.236072, 5.236068], atol=1e-6)

    def test_mixed(self, a9):
        result = solve_maximal(a9, "lanczos")
        np.testing.assert_allclose(matrix_side(result)[:3], [5.361611, 5.235784, 5.236068], atol=1e-6)

    def test_vector_in_original_basis(self, a9):
        result = solve_maximal(a9, "lanczos")
        _, g = perron_pair(a9)
        np.testing.assert_allclose(result.vector, g, atol=1e-8)


class TestSolveMaximal:
    def test_trivial(self):
        with pytest.warns(EigmaxWarning, match="constant row sums"):
            result = solve_maximal([[1., 2.], [2., 1.]])
        assert result.value == 3.
        assert result.strategy == TRIVIAL
        assert result.outcome == CONVERGED
        np.testing.assert_allclose(result.vector, [np.sqrt(.5), np.sqrt(.5)])

    def test_unknown_strategy(self, a9):
        with pytest.raises(InvalidInputError):
            solve_maximal(a9, "shotgun")

    @pytest.mark.parametrize("strategy", [s for s in STRATEGIES if s != "uniform-II"])
    def test_every_strategy_finds_the_root(self, a8, strategy):
        result = solve_maximal(a8, strategy)
        assert result.value == pytest.approx((37 + np.sqrt(2409)) / 200)

    def test_to_dict(self, a9):
        d = solve_maximal(a9).to_dict()
        assert d["strategy"] == "general"
        assert d["steps"] == len(d["z_values"]) - 1
        assert d["value"] == pytest.approx(RHO_A9)


class TestSolveNext:
    def test_tridiagonal(self, conservative_quadratic):
        result = solve_next(conservative_quadratic)
        assert result.strategy == "next-6181"
        assert result.value == pytest.approx(-0.8205391537)
        assert result.z == pytest.approx(0.8205391537)

    def test_dense_tridiagonal(self, conservative_five):
        result = solve_next(conservative_five.to_qmat(), "617")
        assert result.z == pytest.approx(3.0367284496)

    def test_general(self, complex_pair_q):
        result = solve_next(complex_pair_q, "620")
        assert result.strategy == "next-620"
        assert result.z == pytest.approx(8.171311, abs=1e-6)

    def test_unknown_variant(self, conservative_five):
        with pytest.raises(InvalidInputError):
            solve_next(conservative_five, "619")
