import math

import numpy as np
import numpy.testing as npt
import pytest

from network_aggregation.errors import DomainError, LengthMismatch
from network_aggregation.metrics.divergence import (
    bernoulli_kl, bernoulli_kl_logits, decomposition_terms, expected_kl,
    expected_kl_logits, pinsker_gap, verify_decomposition)
from network_aggregation.protocol.sequential_protocol import fit_global
from network_aggregation.solver.logistic_solver import FitOptions
from network_aggregation.solver.logistic_utils import sigmoid

KL_08_05 = 0.8 * math.log(1.6) + 0.2 * math.log(0.4)


@pytest.mark.parametrize("p, q, expected", [
    (0.5, 0.5, 0.0),
    (0.8, 0.5, KL_08_05),
    (0.0, 0.5, math.log(2.0)),
    (1.0, 0.5, math.log(2.0))])
def test_bernoulli_kl(p, q, expected):
    assert bernoulli_kl(p, q) == pytest.approx(expected, abs=1e-15)


def test_bernoulli_kl_value():
    assert KL_08_05 == pytest.approx(0.19274, abs=1e-5)


def test_bernoulli_kl_infinite_only_when_forced():
    assert math.isinf(bernoulli_kl(0.5, 0.0))
    assert bernoulli_kl(0.0, 0.0) == 0.0


@pytest.mark.parametrize("p, q", [(-0.1, 0.5), (0.5, 1.5), (np.nan, 0.5)])
def test_bernoulli_kl_domain(p, q):
    with pytest.raises(DomainError):
        bernoulli_kl(p, q)


def test_logit_form_matches_probability_form(rng):
    a_logits = rng.normal(scale=2.0, size=200)
    b_logits = rng.normal(scale=2.0, size=200)
    npt.assert_allclose(bernoulli_kl_logits(a_logits, b_logits),
                        bernoulli_kl(sigmoid(a_logits), sigmoid(b_logits)),
                        rtol=1e-9, atol=1e-10)
    assert expected_kl_logits(a_logits, b_logits) == pytest.approx(
        expected_kl(sigmoid(a_logits), sigmoid(b_logits)), rel=1e-9)


def test_logit_form_is_stable_in_the_tails():
    assert bernoulli_kl_logits(40.0, 40.0) == 0.0
    assert bernoulli_kl_logits(-40.0, 40.0) == pytest.approx(40.0, rel=1e-9)


def test_expected_kl():
    assert expected_kl([0.3, 0.6], [0.3, 0.6]) == 0.0
    assert expected_kl([0.8, 0.2], [0.5, 0.5]) == pytest.approx(KL_08_05)
    with pytest.raises(LengthMismatch):
        expected_kl([0.1, 0.2], [0.1])


def test_pinsker_examples():
    assert pinsker_gap([0.4], [0.4]) == 0.0
    assert pinsker_gap([0.8], [0.5]) == pytest.approx(KL_08_05 - 0.18)
    assert pinsker_gap([0.8], [0.5]) > 0


def test_pinsker_random_pairs(rng):
    p_values = rng.random(1000)
    q_values = rng.random(1000)
    gaps = [pinsker_gap([p], [q]) for p, q in zip(p_values, q_values)]
    assert min(gaps) >= -1e-12


def test_decomposition(logistic_dataset, rng):
    fit = fit_global(logistic_dataset, FitOptions(grad_tol=1e-12))
    star_logits = fit.logits(logistic_dataset.features)
    features = (1, 2, 3)

    same = decomposition_terms(logistic_dataset, star_logits, star_logits,
                               features)
    assert same.divergence == 0.0
    assert same.residual == 0.0

    zero_residual = verify_decomposition(
        logistic_dataset, star_logits, np.zeros(logistic_dataset.n),
        features)
    assert zero_residual <= 1e-8

    perturbed = fit.weights + np.array([0.1, 0.0, 0.0])
    terms = decomposition_terms(
        logistic_dataset, star_logits,
        logistic_dataset.features @ perturbed, features)
    assert terms.residual <= 1e-8
    assert terms.loss_q - terms.loss_star > 0


def test_decomposition_residual_shrinks_with_tolerance(logistic_dataset):
    query = np.zeros(logistic_dataset.n)
    rough = fit_global(logistic_dataset, FitOptions(max_iters=1))
    tight = fit_global(logistic_dataset, FitOptions(grad_tol=1e-12))
    rough_residual, tight_residual = (
        verify_decomposition(logistic_dataset,
                             fit.logits(logistic_dataset.features), query,
                             (1, 2, 3))
        for fit in (rough, tight))
    assert not rough.converged
    assert tight_residual * 1e3 <= rough_residual


def test_decomposition_checks_lengths(logistic_dataset):
    with pytest.raises(LengthMismatch):
        verify_decomposition(logistic_dataset, np.zeros(3), np.zeros(3),
                             (1,))
