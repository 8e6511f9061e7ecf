import math

import numpy as np
import numpy.testing as npt
import pytest

from network_aggregation.errors import DimensionMismatch, LengthMismatch
from network_aggregation.solver.logistic_utils import (
    bce_loss, bce_objective, pointwise_loss, predict_logits,
    residual_moments, sigmoid, stable_softplus)

EXTREME_LOGITS = [-1e6, -50.0, -1.0, 0.0, 1.0, 50.0, 1e6]


@pytest.mark.parametrize("logit", EXTREME_LOGITS)
def test_sigmoid_symmetry(logit):
    assert sigmoid(logit) + sigmoid(-logit) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("logit", EXTREME_LOGITS)
def test_softplus_identity(logit):
    difference = stable_softplus(logit) - stable_softplus(-logit)
    assert difference == pytest.approx(logit, rel=1e-12, abs=1e-12)


def test_softplus_values():
    assert stable_softplus(0.0) == pytest.approx(math.log(2.0))
    assert stable_softplus(1e6) == 1e6
    assert stable_softplus(-1e6) == 0.0
    npt.assert_allclose(stable_softplus(np.array([-1.0, 2.0])),
                        np.log1p(np.exp([-1.0, 2.0])))


def test_zero_logits_give_log_two():
    assert bce_loss(np.zeros(5), np.array([0, 1, 1, 0, 1])) == \
        pytest.approx(math.log(2.0), abs=1e-15)
    assert bce_loss(np.zeros(2), np.array([0, 1])) == \
        pytest.approx(math.log(2.0), abs=1e-15)


def test_pointwise_loss_is_finite_for_large_logits():
    losses = pointwise_loss(np.array([800.0, -800.0]), np.array([0.0, 1.0]))
    npt.assert_allclose(losses, [800.0, 800.0])


def test_bce_loss_length_mismatch():
    with pytest.raises(LengthMismatch):
        bce_loss(np.zeros(3), np.zeros(2))
    with pytest.raises(LengthMismatch):
        bce_loss(np.zeros(0), np.zeros(0))


def test_predict_logits():
    design = np.array([[1.0, 2.0], [3.0, 4.0]])
    npt.assert_array_equal(predict_logits(np.zeros(2), design), [0.0, 0.0])
    npt.assert_array_equal(predict_logits(np.array([1.0, 0.0]), design),
                           design[:, 0])
    npt.assert_array_equal(predict_logits(np.zeros(0), np.zeros((2, 0))),
                           [0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        predict_logits(np.ones(3), design)


def test_prefix_weights_recover_latent(small_instance):
    logits = predict_logits(np.ones(small_instance.d),
                            small_instance.features)
    npt.assert_allclose(logits, small_instance.latents[:, -1], rtol=1e-12,
                        atol=1e-12)


def test_residual_moments_zero_column(rng):
    design = np.column_stack([rng.standard_normal(50), np.zeros(50)])
    labels = (rng.random(50) < 0.5).astype(float)
    moments = residual_moments(design, rng.standard_normal(50), labels)
    assert moments[1] == 0.0
    with pytest.raises(DimensionMismatch):
        residual_moments(design, np.zeros(49), labels)


@pytest.mark.parametrize("trial", range(5))
def test_gradient_matches_finite_differences(trial):
    generator = np.random.default_rng(trial)
    sample_count = int(generator.integers(5, 51))
    column_count = int(generator.integers(1, 6))
    design = generator.standard_normal((sample_count, column_count))
    labels = (generator.random(sample_count) < 0.5).astype(float)
    weights = generator.standard_normal(column_count)
    ridge = 0.1 * trial

    _loss, gradient = bce_objective(weights, design, labels, ridge)
    step = 1e-5
    numerical = np.zeros(column_count)
    for column in range(column_count):
        offset = np.zeros(column_count)
        offset[column] = step
        numerical[column] = (
            bce_objective(weights + offset, design, labels, ridge)[0]
            - bce_objective(weights - offset, design, labels, ridge)[0]
        ) / (2 * step)
    scale = max(float(np.max(np.abs(gradient))), 1e-3)
    assert np.max(np.abs(numerical - gradient)) / scale <= 1e-6
