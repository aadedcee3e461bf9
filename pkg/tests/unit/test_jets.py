"""
Tests for n-jet fitting: Vandermonde rows, LS/WLS solves and jet normals
"""

import numpy as np
import pytest

from evaluation.metrics import unoriented_angle_error
from fitting.jets import (
    CONDITION_LIMIT, JetModel, build_vandermonde, evaluate_jet, jet_gradient, jet_term_count, ls_fit,
    monomial_exponents, neighbor_normals, normal_from_beta, surface_grid, wls_fit,
)
from tests.fixtures.sample_data import dihedral_patch_points, jet_points, random_jet
from utils.exceptions import InvalidInputError, UnderdeterminedSystemError


class TestTermCount:
    @pytest.mark.parametrize("order, count", [(0, 1), (1, 3), (2, 6), (3, 10), (4, 15)])
    def test_formula(self, order, count):
        assert jet_term_count(order) == count
        assert len(monomial_exponents(order)) == count

    def test_negative_order(self):
        with pytest.raises(InvalidInputError):
            jet_term_count(-1)


class TestVandermonde:
    def test_order_one(self):
        np.testing.assert_array_equal(build_vandermonde([[2.0, 3.0]], 1), [[1, 2, 3]])

    def test_order_two_at_ones(self):
        np.testing.assert_array_equal(build_vandermonde([[1.0, 1.0]], 2), [[1, 1, 1, 1, 1, 1]])

    def test_order_three_row(self):
        np.testing.assert_array_equal(build_vandermonde([[2.0, 0.0]], 3), [[1, 2, 0, 4, 0, 0, 8, 0, 0, 0]])

    def test_monomial_order(self):
        assert monomial_exponents(2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))

    def test_first_column_is_ones(self, rng):
        matrix = build_vandermonde(rng.random((7, 2)), 4)
        assert matrix.shape == (7, 15)
        np.testing.assert_array_equal(matrix[:, 0], 1.0)


class TestLeastSquares:
    def test_plane_interpolation(self, rng):
        xy = rng.uniform(-1, 1, size=(12, 2))
        points = np.column_stack((xy, 0.5 * xy[:, 0] + 0.25 * xy[:, 1]))
        model, diagnostics = ls_fit(points, 1)
        np.testing.assert_allclose(model.beta, [0.0, 0.5, 0.25], atol=1e-10)
        assert diagnostics.residual_norm < 1e-10
        assert not diagnostics.ridge_applied

    def test_exact_recovery_order_three(self, rng):
        truth = random_jet(3, rng)
        model, _ = ls_fit(jet_points(truth, 40, rng), 3)
        np.testing.assert_allclose(model.beta, truth.beta, atol=1e-8)

    def test_constant_shift_moves_only_intercept(self, rng):
        points = jet_points(random_jet(2, rng), 30, rng)
        base, _ = ls_fit(points, 2)
        shifted, _ = ls_fit(points + [0.0, 0.0, 0.7], 2)
        np.testing.assert_allclose(shifted.beta[0] - base.beta[0], 0.7, atol=1e-10)
        np.testing.assert_allclose(shifted.beta[1:], base.beta[1:], atol=1e-10)

    def test_underdetermined(self, rng):
        with pytest.raises(UnderdeterminedSystemError):
            ls_fit(rng.random((9, 3)), 3)

    def test_bad_shape(self):
        with pytest.raises(InvalidInputError):
            ls_fit(np.zeros((10, 2)), 1)


class TestWeightedLeastSquares:
    def test_unit_weights_equal_ls(self, rng):
        points = rng.uniform(-1, 1, size=(50, 3))
        weighted, _ = wls_fit(points, np.ones(50), 3)
        plain, _ = ls_fit(points, 3)
        np.testing.assert_allclose(weighted.beta, plain.beta, atol=1e-12)

    def test_weight_scale_invariance(self, rng):
        points = rng.uniform(-1, 1, size=(30, 3))
        weights = rng.uniform(0.1, 1.0, size=30)
        a, _ = wls_fit(points, weights, 2)
        b, _ = wls_fit(points, 3.0 * weights, 2)
        np.testing.assert_allclose(a.beta, b.beta, atol=1e-12)

    def test_duplicate_point_equals_doubled_weight(self, rng):
        points = rng.uniform(-1, 1, size=(30, 3))
        weights = rng.uniform(0.1, 1.0, size=30)
        duplicated, _ = wls_fit(np.vstack((points, points[4:5])), np.append(weights, weights[4]), 3)
        doubled_weights = weights.copy()
        doubled_weights[4] *= 2.0
        doubled, _ = wls_fit(points, doubled_weights, 3)
        np.testing.assert_allclose(duplicated.beta, doubled.beta, atol=1e-10)

    def test_perturbed_beta_never_fits_better(self, rng):
        points = rng.uniform(-1, 1, size=(40, 3))
        weights = rng.uniform(0.1, 1.0, size=40)
        model, _ = wls_fit(points, weights, 2)
        vandermonde = build_vandermonde(points[:, :2], 2)

        def residual(beta):
            return np.sum(weights * (vandermonde @ beta - points[:, 2]) ** 2)

        best = residual(model.beta)
        for column in range(len(model.beta)):
            for sign in (1.0, -1.0):
                shifted = model.beta.copy()
                shifted[column] += sign * 1e-4
                assert residual(shifted) >= best

    def test_two_plane_oracle_weights(self):
        points, on_a, normal_a = dihedral_patch_points(r=128, distance=0.05)
        model, _ = wls_fit(points, on_a.astype(float), 1)
        assert unoriented_angle_error(normal_from_beta(model), normal_a) < 1e-6

    def test_zero_weights_count_as_missing(self, rng):
        points = rng.uniform(-1, 1, size=(20, 3))
        weights = np.zeros(20)
        weights[:5] = 1.0
        with pytest.raises(UnderdeterminedSystemError):
            wls_fit(points, weights, 2)

    def test_negative_weights_rejected(self, rng):
        with pytest.raises(InvalidInputError):
            wls_fit(rng.random((10, 3)), -np.ones(10), 1)

    def test_weight_count_must_match(self, rng):
        with pytest.raises(InvalidInputError):
            wls_fit(rng.random((10, 3)), np.ones(9), 1)

    def test_near_singular_system_uses_ridge(self):
        x = np.linspace(-1, 1, 20)
        points = np.column_stack((x, 1e-9 * np.sin(7 * x), x ** 2))
        model, diagnostics = wls_fit(points, np.ones(20), 2)
        assert diagnostics.condition_hint > CONDITION_LIMIT
        assert diagnostics.ridge_applied
        assert np.all(np.isfinite(model.beta))


class TestJetNormals:
    def test_flat_jet(self):
        np.testing.assert_array_equal(normal_from_beta(JetModel(1, np.zeros(3))), [0.0, 0.0, 1.0])

    def test_unit_slope(self):
        np.testing.assert_allclose(normal_from_beta(JetModel(1, np.array([0.0, 1.0, 0.0]))),
                                   np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0))

    def test_plane_normal(self):
        normal = normal_from_beta(JetModel(1, np.array([0.0, 0.5, 0.25])))
        expected = np.array([-0.5, -0.25, 1.0]) / np.linalg.norm([-0.5, -0.25, 1.0])
        np.testing.assert_allclose(normal, expected, atol=1e-15)

    def test_neighbor_normal_at_origin_matches(self, rng):
        model = random_jet(3, rng)
        np.testing.assert_allclose(neighbor_normals(model, [[0.0, 0.0]])[0], normal_from_beta(model),
                                   rtol=0, atol=1e-15)

    def test_parabola(self):
        model = JetModel(2, np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
        expected = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0)
        np.testing.assert_allclose(neighbor_normals(model, [[0.5, 0.0]])[0], expected, atol=1e-15)

    def test_gradient_matches_finite_differences(self, rng):
        model = random_jet(3, rng)
        xy = rng.uniform(-1, 1, size=(20, 2))
        h = 1e-6
        dx = (evaluate_jet(model, xy + [h, 0]) - evaluate_jet(model, xy - [h, 0])) / (2 * h)
        dy = (evaluate_jet(model, xy + [0, h]) - evaluate_jet(model, xy - [0, h])) / (2 * h)
        np.testing.assert_allclose(jet_gradient(model, xy), np.column_stack((dx, dy)), atol=1e-7)

        numeric = np.column_stack((-dx, -dy, np.ones(20)))
        for analytic, expected in zip(neighbor_normals(model, xy), numeric):
            assert unoriented_angle_error(analytic, expected) < 1e-6

    def test_order_zero_has_no_normal(self):
        with pytest.raises(InvalidInputError):
            normal_from_beta(JetModel(0, np.zeros(1)))


class TestEvaluateJet:
    def test_zero_beta(self, rng):
        np.testing.assert_array_equal(evaluate_jet(JetModel(3, np.zeros(10)), rng.random((5, 2))), 0.0)

    def test_constant(self, rng):
        beta = np.zeros(6)
        beta[0] = 1.0
        np.testing.assert_array_equal(evaluate_jet(JetModel(2, beta), rng.random((5, 2))), 1.0)

    def test_square_term(self):
        beta = np.zeros(6)
        beta[3] = 1.0
        xy = np.column_stack((np.full(4, 0.5), [-1.0, 0.0, 0.3, 2.0]))
        np.testing.assert_allclose(evaluate_jet(JetModel(2, beta), xy), 0.25)

    def test_surface_grid(self):
        grid = surface_grid(JetModel(1, np.array([1.0, 0.0, 0.0])), extent=2.0, resolution=5)
        assert grid.shape == (25, 3)
        assert grid[:, 0].min() == -2.0 and grid[:, 0].max() == 2.0
        np.testing.assert_array_equal(grid[:, 2], 1.0)

    def test_model_beta_length_checked(self):
        with pytest.raises(InvalidInputError):
            JetModel(2, np.zeros(3))


class TestExactRecoveryAcrossOrders:
    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_twenty_random_jets(self, order):
        rng = np.random.default_rng(order)
        count = 2 * jet_term_count(order)
        for _ in range(20):
            truth = random_jet(order, rng)
            model, _ = wls_fit(jet_points(truth, count, rng), np.ones(count), order)
            assert np.max(np.abs(model.beta - truth.beta)) < 1e-8
            assert unoriented_angle_error(normal_from_beta(model), normal_from_beta(truth)) < 1e-6
