import numpy as np
import pytest

from polariscope.core.errors import BadStartError, InsufficientDataError, JacobianError
from polariscope.core.fitting import (
    FitProblem,
    FitStatus,
    finite_difference_jacobian,
    least_squares,
)


def test_linear_model_is_recovered_exactly():
    x = np.linspace(0.0, 1.0, 20)
    y = 2.0 * x - 1.0
    result = least_squares(FitProblem(lambda p: p[0] * x + p[1] - y, [0.5, 0.5]))
    assert result.converged
    np.testing.assert_allclose(result.params, [2.0, -1.0], atol=1e-8)


def test_gaussian_with_noise(rng):
    x = np.linspace(-3.0, 3.0, 201)
    truth = np.array([1.0, 0.2, 0.8])

    def model(p):
        return p[0] * np.exp(-(((x - p[1]) / p[2]) ** 2))

    y = model(truth) + rng.normal(0.0, 0.01, x.size)
    result = least_squares(FitProblem(lambda p: model(p) - y, [0.7, 0.0, 1.2]))
    assert result.converged
    np.testing.assert_allclose(result.params, truth, atol=0.02)
    assert np.all(result.uncertainty > 0)


def test_zero_residual_start_needs_no_iterations():
    result = least_squares(FitProblem(lambda p: p - 3.0, [3.0]))
    assert result.iterations == 0
    assert result.cost == 0.0
    assert result.status is FitStatus.CONVERGED


def test_accepted_costs_never_increase():
    x = np.linspace(0.0, 2.0, 30)
    y = np.exp(-1.3 * x)
    result = least_squares(FitProblem(lambda p: np.exp(-p[0] * x) - y, [0.1]))
    assert all(a >= b for a, b in zip(result.cost_history, result.cost_history[1:]))
    assert result.params[0] == pytest.approx(1.3, abs=1e-6)


def test_bounds_are_respected():
    result = least_squares(FitProblem(lambda p: p - 5.0, [0.0], upper=[3.0]))
    assert result.params[0] == pytest.approx(3.0)


def test_central_difference_of_square():
    jac = finite_difference_jacobian(lambda p: p**2, np.array([3.0]))
    assert jac[0, 0] == pytest.approx(6.0, abs=1e-6)


def test_jacobian_of_affine_residual():
    a = np.array([[1.0, 2.0], [-3.0, 0.5], [0.0, 4.0]])
    jac = finite_difference_jacobian(lambda p: a @ p - 1.0, np.array([0.3, -2.0]))
    np.testing.assert_allclose(jac, a, atol=1e-8)


def test_one_sided_difference_at_a_bound():
    jac = finite_difference_jacobian(
        lambda p: p**2, np.array([1.0]), lower=np.array([1.0]), upper=np.array([2.0])
    )
    assert jac[0, 0] == pytest.approx(2.0, abs=1e-4)


def test_non_finite_jacobian_is_reported():
    with pytest.raises(JacobianError):
        finite_difference_jacobian(lambda p: np.sqrt(p), np.array([0.0]))


def test_non_finite_start_is_rejected():
    with pytest.raises(BadStartError):
        least_squares(FitProblem(lambda p: np.array([np.nan, 1.0]), [1.0]))


def test_underdetermined_problem_is_rejected():
    with pytest.raises(InsufficientDataError):
        least_squares(FitProblem(lambda p: np.array([p[0] + p[1]]), [1.0, 1.0]))


def test_problem_validates_bounds():
    with pytest.raises(ValueError):
        FitProblem(lambda p: p, [5.0], lower=[0.0], upper=[1.0])
    with pytest.raises(ValueError):
        FitProblem(lambda p: p, [0.5], max_iterations=0)
