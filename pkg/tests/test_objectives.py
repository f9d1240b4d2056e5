import numpy as np
import pytest

from factordescent import (Objective, ShapeMismatchError, eta_fixed,
                           factored_gradient, g_value, matrix_factorization,
                           mf_constants, mf_grad, mf_value)

from oracles import central_difference


def random_symmetric(rng, n):
    m = rng.standard_normal((n, n))
    return m + m.T


class TestMfValue:
    def test_zero_at_target(self):
        a = np.diag([1.0, 2.0])
        assert mf_value(a, a) == 0.0

    def test_identity_vs_zero(self):
        assert mf_value(np.zeros((2, 2)), np.eye(2)) == pytest.approx(2.0)

    def test_swapped_diagonals(self):
        assert mf_value(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(2.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            mf_value(np.eye(2), np.eye(3))

    @pytest.mark.parametrize("seed", range(10))
    def test_midpoint_convexity(self, seed):
        rng = np.random.default_rng(seed)
        a = random_symmetric(rng, 4)
        x = random_symmetric(rng, 4)
        y = random_symmetric(rng, 4)
        mid = mf_value(a, 0.5 * (x + y))
        assert mid <= 0.5 * (mf_value(a, x) + mf_value(a, y)) + 1e-9


class TestMfGrad:
    def test_zero_at_target(self):
        a = np.diag([1.0, 2.0])
        np.testing.assert_array_equal(mf_grad(a, a), np.zeros((2, 2)))

    def test_identity_vs_zero(self):
        np.testing.assert_allclose(mf_grad(np.zeros((2, 2)), np.eye(2)), 2.0 * np.eye(2))

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_central_differences(self, seed):
        rng = np.random.default_rng(40 + seed)
        a = random_symmetric(rng, 5)
        x = random_symmetric(rng, 5)
        e = random_symmetric(rng, 5)
        numeric = central_difference(lambda z: mf_value(a, z), x, e, t=1e-5)
        analytic = float(np.sum(mf_grad(a, x) * e))
        assert numeric == pytest.approx(analytic, abs=1e-8)


class TestMfConstants:
    def test_values(self):
        assert mf_constants(np.eye(3)) == (2.0, 2.0)

    def test_kappa_one(self):
        obj = matrix_factorization(np.eye(3))
        assert obj.kappa == 1.0

    @pytest.mark.parametrize("seed", range(5))
    def test_quadratic_expansion_is_exact(self, seed):
        # f(Y) = f(X) + <grad f(X), Y-X> + (m/2) ||Y-X||_F^2 with equality
        rng = np.random.default_rng(70 + seed)
        a = random_symmetric(rng, 4)
        x = random_symmetric(rng, 4)
        y = random_symmetric(rng, 4)
        m, _ = mf_constants(a)
        expansion = (mf_value(a, x) + np.sum(mf_grad(a, x) * (y - x))
                     + 0.5 * m * np.sum((y - x) ** 2))
        assert mf_value(a, y) == pytest.approx(expansion, rel=1e-12, abs=1e-12)


class TestGValue:
    def test_zero_at_solution(self):
        rng = np.random.default_rng(0)
        u = rng.standard_normal((5, 2))
        obj = matrix_factorization(u @ u.T)
        assert g_value(obj, u) <= 1e-18

    def test_zero_factor(self):
        obj = matrix_factorization(np.eye(2))
        assert g_value(obj, np.zeros((2, 1))) == pytest.approx(2.0)


class TestFactoredGradient:
    def test_vanishes_at_solution(self):
        rng = np.random.default_rng(1)
        u = rng.standard_normal((5, 2))
        obj = matrix_factorization(u @ u.T)
        assert np.max(np.abs(factored_gradient(obj, u))) <= 1e-9

    def test_zero_target(self):
        obj = matrix_factorization(np.zeros((2, 2)))
        np.testing.assert_allclose(factored_gradient(obj, np.eye(2)), 2.0 * np.eye(2))

    @pytest.mark.parametrize("seed", range(5))
    def test_half_of_chain_rule_gradient(self, seed):
        # d/dt g(U + t E) at 0 equals <2 grad f(X) U, E> for symmetric grad f
        rng = np.random.default_rng(90 + seed)
        u = rng.standard_normal((5, 2))
        e = rng.standard_normal((5, 2))
        obj = matrix_factorization(random_symmetric(rng, 5))
        numeric = central_difference(lambda z: g_value(obj, z), u, e, t=1e-5)
        analytic = 2.0 * float(np.sum(factored_gradient(obj, u) * e))
        assert numeric == pytest.approx(analytic, rel=1e-6, abs=1e-6)

    @pytest.mark.parametrize("seed", range(5))
    def test_small_step_descends(self, seed):
        rng = np.random.default_rng(120 + seed)
        u_star = rng.uniform(-1.0, 1.0, (8, 2))
        obj = matrix_factorization(u_star @ u_star.T)
        u = rng.standard_normal((8, 2))
        direction = factored_gradient(obj, u)
        assert np.any(direction)
        x = u @ u.T
        eta = 1e-4 * eta_fixed(obj.M, x, obj.grad(x))
        assert g_value(obj, u - eta * direction) <= g_value(obj, u)


class TestObjectiveValidation:
    def test_requires_ordered_constants(self):
        with pytest.raises(ValueError):
            Objective(value=lambda x: 0.0, grad=lambda x: x, m=3.0, M=1.0)

    def test_rejects_asymmetric_target(self):
        with pytest.raises(ValueError):
            matrix_factorization(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @pytest.mark.parametrize("seed", range(3))
    def test_gradient_symmetric_on_symmetric_input(self, seed):
        rng = np.random.default_rng(150 + seed)
        a = random_symmetric(rng, 4)
        obj = matrix_factorization(a)
        x = random_symmetric(rng, 4)
        grad = obj.grad(x)
        assert np.max(np.abs(grad - grad.T)) <= 1e-9
