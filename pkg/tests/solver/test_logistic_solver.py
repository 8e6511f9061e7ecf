import math

import numpy as np
import numpy.testing as npt
import pytest

from network_aggregation.errors import (
    DimensionMismatch, InvalidLabels, LengthMismatch, NonFinite)
from network_aggregation.solver.logistic_solver import (
    DIAGNOSTIC_MAX_ITERS, DIAGNOSTIC_NORM_CAP, FitOptions, fit_logistic)
from network_aggregation.solver.logistic_utils import (
    predict_logits, residual_moments)
from network_aggregation.instances.hard_instance import (
    HardInstanceSpec, generate_hard_instance)


def test_fit_converges_and_is_stationary(logistic_dataset):
    fit = fit_logistic(logistic_dataset.features, logistic_dataset.labels)
    assert fit.converged
    assert fit.diagnostic is None
    assert fit.grad_norm <= FitOptions().grad_tol
    moments = residual_moments(logistic_dataset.features,
                               fit.logits(logistic_dataset.features),
                               logistic_dataset.labels)
    assert np.max(np.abs(moments)) <= FitOptions().grad_tol
    assert fit.loss <= math.log(2.0) + 1e-12


def test_fit_recovers_weights(logistic_dataset):
    fit = fit_logistic(logistic_dataset.features, logistic_dataset.labels)
    npt.assert_allclose(fit.weights, [1.0, -0.5, 0.25], atol=0.15)


def test_zero_column_leaves_loss_at_log_two():
    labels = np.array([0, 1, 1, 0, 1, 0], dtype=float)
    fit = fit_logistic(np.zeros((6, 1)), labels)
    assert fit.converged
    assert fit.loss == pytest.approx(math.log(2.0), abs=1e-15)


def test_empty_design():
    fit = fit_logistic(np.zeros((4, 0)), np.array([0, 1, 0, 1]))
    assert fit.converged
    assert fit.weights.shape == (0,)
    assert fit.loss == pytest.approx(math.log(2.0))


def test_label_column_converges(rng):
    labels = (rng.random(20000) < 0.5).astype(float)
    noisy = np.where(rng.random(20000) < 0.2, 1 - labels, labels)
    design = (2 * noisy - 1).reshape(-1, 1)
    fit = fit_logistic(design, labels)
    assert fit.converged
    # Flipping 20% of the signs gives weight log(0.8 / 0.2) / 1
    assert fit.weights[0] == pytest.approx(math.log(4.0), abs=0.1)


def test_adding_a_column_never_increases_loss(logistic_dataset):
    small = fit_logistic(logistic_dataset.features[:, :2],
                         logistic_dataset.labels)
    large = fit_logistic(logistic_dataset.features, logistic_dataset.labels)
    assert large.loss <= small.loss + 10 * FitOptions().grad_tol


def test_separable_data_hits_norm_cap():
    design = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    fit = fit_logistic(design, np.array([0, 0, 1, 1]),
                       FitOptions(weight_norm_cap=5.0))
    assert not fit.converged
    assert fit.diagnostic == DIAGNOSTIC_NORM_CAP
    assert np.all(np.isfinite(fit.weights))


def test_max_iterations_diagnostic(logistic_dataset):
    fit = fit_logistic(logistic_dataset.features, logistic_dataset.labels,
                       FitOptions(max_iters=1, grad_tol=1e-15))
    assert not fit.converged
    assert fit.diagnostic == DIAGNOSTIC_MAX_ITERS
    assert fit.iterations == 1


def test_warm_start_at_optimum(logistic_dataset):
    cold = fit_logistic(logistic_dataset.features, logistic_dataset.labels)
    warm = fit_logistic(logistic_dataset.features, logistic_dataset.labels,
                        initial_weights=cold.weights)
    assert warm.iterations <= 1
    assert warm.loss == pytest.approx(cold.loss, abs=1e-12)


def test_bad_warm_start_is_ignored(logistic_dataset):
    fit = fit_logistic(logistic_dataset.features, logistic_dataset.labels,
                       initial_weights=np.full(3, 50.0))
    assert fit.converged
    with pytest.raises(DimensionMismatch):
        fit_logistic(logistic_dataset.features, logistic_dataset.labels,
                     initial_weights=np.zeros(2))


def test_duplicated_column(logistic_dataset):
    design = np.column_stack([logistic_dataset.features,
                              logistic_dataset.features[:, 0]])
    fit = fit_logistic(design, logistic_dataset.labels)
    reference = fit_logistic(logistic_dataset.features,
                             logistic_dataset.labels)
    assert fit.converged
    assert fit.loss == pytest.approx(reference.loss, abs=1e-9)


def test_intercept(rng):
    design = rng.standard_normal((4000, 1))
    labels = (rng.random(4000) < 0.8).astype(float)
    fit = fit_logistic(design, labels, FitOptions(fit_intercept=True))
    assert fit.converged
    assert fit.intercept == pytest.approx(math.log(4.0), abs=0.2)
    npt.assert_allclose(fit.logits(design),
                        predict_logits(fit.weights, design) + fit.intercept)


def test_ridge_shrinks_weights(logistic_dataset):
    plain = fit_logistic(logistic_dataset.features, logistic_dataset.labels)
    ridged = fit_logistic(logistic_dataset.features, logistic_dataset.labels,
                          FitOptions(ridge=1.0))
    assert np.linalg.norm(ridged.weights) < np.linalg.norm(plain.weights)
    assert ridged.loss >= plain.loss


@pytest.mark.parametrize("design, labels, error", [
    (np.array([[np.nan]]), np.array([1.0]), NonFinite),
    (np.array([[1.0]]), np.array([2.0]), InvalidLabels),
    (np.ones((2, 1)), np.array([1.0]), LengthMismatch),
    (np.ones(3), np.array([1.0, 0.0, 1.0]), DimensionMismatch)])
def test_invalid_inputs(design, labels, error):
    with pytest.raises(error):
        fit_logistic(design, labels)


@pytest.mark.parametrize("options", [
    FitOptions(grad_tol=0.0), FitOptions(max_iters=0),
    FitOptions(ridge=-1.0), FitOptions(backtrack=1.0),
    FitOptions(initial_step=0.0)])
def test_invalid_options(options):
    with pytest.raises(ValueError):
        options.validate()


def test_fit_result_to_dict(logistic_dataset):
    fit_dict = fit_logistic(logistic_dataset.features,
                            logistic_dataset.labels).to_dict()
    assert len(fit_dict["weights"]) == 3
    assert fit_dict["converged"] is True


@pytest.mark.slow
def test_hard_instance_weights_are_all_ones():
    dataset = generate_hard_instance(HardInstanceSpec(k=4, n=200000, seed=5))
    fit = fit_logistic(dataset.features, dataset.labels)
    assert fit.converged
    npt.assert_allclose(fit.weights, np.ones(4), atol=0.05)
