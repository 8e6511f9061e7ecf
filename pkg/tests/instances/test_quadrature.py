import math

import numpy as np
import pytest

from network_aggregation.errors import InvalidDimension
from network_aggregation.instances.quadrature import (
    bayes_loss, gaussian_expectation, h_function, hermite_nodes,
    optimal_scaling_factor, predicted_pass_excess, scaling_gradient,
    scaling_loss, signal_variance)

SCALING_PASSES = [1, 2, 4, 8, 16, 64]


@pytest.mark.parametrize("variance", [0.25, 1.0, 4.0])
def test_gaussian_moments(variance):
    assert gaussian_expectation(lambda x: x ** 2, variance) == \
        pytest.approx(variance, rel=1e-12)
    assert gaussian_expectation(lambda x: x, variance) == \
        pytest.approx(0.0, abs=1e-12)
    assert gaussian_expectation(np.cos, variance) == \
        pytest.approx(math.exp(-variance / 2), rel=1e-10)


def test_hermite_nodes_are_cached():
    assert hermite_nodes(50) is hermite_nodes(50)
    with pytest.raises(InvalidDimension):
        hermite_nodes(0)


def test_h_is_increasing():
    values = [h_function(scale) for scale in (0.5, 1.0, 1.5, 2.0, 3.0)]
    assert all(later > earlier for earlier, later in zip(values, values[1:]))


@pytest.mark.parametrize("p", SCALING_PASSES)
def test_gradient_brackets(p):
    assert scaling_gradient(0.0, p) < 0
    assert scaling_gradient(1.0, p) > 0


@pytest.mark.parametrize("p", SCALING_PASSES)
def test_optimal_scaling_factor(p):
    c_star = optimal_scaling_factor(p)
    assert 0.0 < c_star < 1.0
    assert abs(scaling_gradient(c_star, p)) <= 1e-10


def test_scaling_factor_increases_with_passes():
    factors = [optimal_scaling_factor(p) for p in SCALING_PASSES]
    assert all(later > earlier for earlier, later in zip(factors, factors[1:]))


def test_scaling_factor_minimizes_loss():
    c_star = optimal_scaling_factor(2)
    for offset in (-0.05, 0.05):
        assert scaling_loss(c_star + offset, 2) > scaling_loss(c_star, 2)


def test_predicted_excess_decreases():
    excess = [predicted_pass_excess(p) for p in (1, 2, 4, 8)]
    assert all(value > 0 for value in excess)
    assert all(later < earlier for earlier, later in zip(excess, excess[1:]))


def test_bayes_loss_is_below_log_two():
    assert 0.0 < bayes_loss() < math.log(2.0)


def test_invalid_pass():
    with pytest.raises(InvalidDimension):
        signal_variance(0.5)
    with pytest.raises(InvalidDimension):
        optimal_scaling_factor(0)
    with pytest.raises(InvalidDimension):
        gaussian_expectation(np.cos, -1.0)
