import numpy as np
import numpy.testing as npt
import pytest

from network_aggregation.errors import InvalidDimension
from network_aggregation.instances.pass_predictor import (
    brute_force_pass_coefficients, optimal_pass_coefficients,
    pass_predictor_from_alphas, variance_of_residual)


def test_first_pass():
    predictor = optimal_pass_coefficients(1, 0.7)
    npt.assert_allclose(predictor.coefficients, [0.7])
    assert predictor.residual_variance == pytest.approx(0.49)
    assert predictor.noise_variance_scaled == pytest.approx(1.0)


def test_second_pass():
    predictor = optimal_pass_coefficients(2, 1.0)
    npt.assert_allclose(predictor.alphas, [-0.5])
    assert predictor.alpha_sum == pytest.approx(-0.5)
    assert predictor.residual_variance == pytest.approx(0.5)
    npt.assert_allclose(predictor.coefficients, [1.0, 0.5])


@pytest.mark.parametrize("p", [1, 3, 6])
@pytest.mark.parametrize("c", [0.0, 0.3, 1.0])
def test_closed_form(p, c):
    predictor = optimal_pass_coefficients(p, c)
    assert predictor.coefficients.shape == (p,)
    npt.assert_allclose(predictor.coefficients,
                        c * (1.0 - np.arange(p) / p), atol=1e-14)
    assert predictor.alpha_sum == pytest.approx(-c * (p - 1) / p)
    assert predictor.residual_variance == pytest.approx(c ** 2 / p)
    assert predictor.noise_variance_scaled == pytest.approx(1.0)


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("c", [0.3, 0.7, 1.0])
def test_brute_force_matches_closed_form(p, c):
    closed = optimal_pass_coefficients(p, c)
    brute = brute_force_pass_coefficients(p, c)
    npt.assert_allclose(brute.coefficients, closed.coefficients, atol=1e-9)
    assert brute.residual_variance == pytest.approx(
        closed.residual_variance, abs=1e-9)


def test_non_optimal_alphas_have_more_variance():
    optimal = optimal_pass_coefficients(3, 0.8)
    other = pass_predictor_from_alphas(3, 0.8, [-0.4, 0.0])
    assert other.residual_variance > optimal.residual_variance
    assert other.noise_variance_scaled > 1.0


def test_variance_of_residual():
    assert variance_of_residual([], 2.0) == 4.0
    assert variance_of_residual([1.0, -1.0], 0.5) == pytest.approx(2.25)


def test_feature_weights():
    weights = optimal_pass_coefficients(2, 1.0).feature_weights(4)
    npt.assert_allclose(weights, [0.0, 0.0, 0.5, 1.0])
    with pytest.raises(InvalidDimension):
        optimal_pass_coefficients(3, 1.0).feature_weights(2)


def test_invalid_arguments():
    with pytest.raises(InvalidDimension):
        optimal_pass_coefficients(0, 1.0)
    with pytest.raises(InvalidDimension):
        pass_predictor_from_alphas(3, 1.0, [0.1])


def test_to_dict():
    predictor_dict = optimal_pass_coefficients(2, 1.0).to_dict()
    assert predictor_dict["p"] == 2
    assert predictor_dict["alphas"] == [-0.5]
