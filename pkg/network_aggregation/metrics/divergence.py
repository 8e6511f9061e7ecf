"""
Bernoulli KL machinery: the expected divergence D(p||q), its logit form, the
factor-2 Pinsker bound and the loss decomposition L(q) = L(p*) + D(p*||q)
"""
from typing import Iterable, NamedTuple, Union

import numpy as np
from scipy.special import rel_entr

from network_aggregation.domain.dataset import Dataset
from network_aggregation.errors import (
    DomainError, IndexOutOfRange, LengthMismatch)
from network_aggregation.solver.logistic_utils import (
    bce_loss, sigmoid, stable_softplus)

ArrayLike = Union[float, np.ndarray]


def _check_probabilities(values: np.ndarray, name: str):
    if np.any(np.isnan(values)) or np.any(values < 0) or np.any(values > 1):
        raise DomainError(f"{name} must lie in [0, 1]")


def _scalar_or_array(values: np.ndarray) -> ArrayLike:
    if values.ndim == 0:
        return float(values)
    return values


def bernoulli_kl(p: ArrayLike, q: ArrayLike) -> ArrayLike:
    """
    KL(Bernoulli(p) || Bernoulli(q)) with the 0 log 0 = 0 convention

    Returns +inf only when q puts zero mass where p does not (ex. q = 0 with
    p > 0). Fitted logistic predictors never produce exact 0/1 probabilities.

    Args:
        p (ArrayLike): probabilities in [0, 1]
        q (ArrayLike): probabilities in [0, 1]

    Raises:
        DomainError: p or q outside [0, 1]

    Returns:
        ArrayLike: elementwise divergence, >= 0
    """
    p_array = np.asarray(p, dtype=np.float64)
    q_array = np.asarray(q, dtype=np.float64)
    _check_probabilities(p_array, "p")
    _check_probabilities(q_array, "q")
    divergence = rel_entr(p_array, q_array) + \
        rel_entr(1.0 - p_array, 1.0 - q_array)
    return _scalar_or_array(np.maximum(divergence, 0.0))


def bernoulli_kl_logits(p_logits: ArrayLike, q_logits: ArrayLike
                        ) -> ArrayLike:
    """
    KL(Bernoulli(sigma(a)) || Bernoulli(sigma(b))) from logits,
        sigma(a)(a - b) - softplus(a) + softplus(b), stable near p = 0, 1
    """
    a_array = np.asarray(p_logits, dtype=np.float64)
    b_array = np.asarray(q_logits, dtype=np.float64)
    divergence = (sigmoid(a_array) * (a_array - b_array)
                  - stable_softplus(a_array) + stable_softplus(b_array))
    return _scalar_or_array(np.maximum(divergence, 0.0))


def _paired_vectors(p_col: np.ndarray, q_col: np.ndarray):
    p_vector = np.asarray(p_col, dtype=np.float64).ravel()
    q_vector = np.asarray(q_col, dtype=np.float64).ravel()
    if p_vector.shape != q_vector.shape:
        raise LengthMismatch(
            f"columns of length {p_vector.shape[0]} and {q_vector.shape[0]}")
    if p_vector.shape[0] == 0:
        raise LengthMismatch("columns must not be empty")
    return p_vector, q_vector


def expected_kl(p_col: np.ndarray, q_col: np.ndarray) -> float:
    """
    D(p||q) = mean of the pointwise Bernoulli KL between two probability
        columns

    Raises:
        LengthMismatch: the columns differ in length
    """
    p_vector, q_vector = _paired_vectors(p_col, q_col)
    return float(np.mean(bernoulli_kl(p_vector, q_vector)))


def expected_kl_logits(p_logits: np.ndarray, q_logits: np.ndarray) -> float:
    """
    D(sigma(a)||sigma(b)) from two logit columns
    """
    a_vector, b_vector = _paired_vectors(p_logits, q_logits)
    return float(np.mean(bernoulli_kl_logits(a_vector, b_vector)))


def pinsker_gap(p_col: np.ndarray, q_col: np.ndarray) -> float:
    """
    D(p||q) - 2 mean((p - q)^2), never below -1e-12 up to rounding

    Raises:
        LengthMismatch: the columns differ in length
    """
    p_vector, q_vector = _paired_vectors(p_col, q_col)
    mean_squared = float(np.mean((p_vector - q_vector) ** 2))
    return expected_kl(p_vector, q_vector) - 2.0 * mean_squared


class DecompositionTerms(NamedTuple):
    """
    Both sides of L(q) = L(p*) + D(p*||q) measured on one dataset
    """
    loss_q: float
    loss_star: float
    divergence: float
    residual: float


def decomposition_terms(dataset: Dataset, star_logits: np.ndarray,
                        q_logits: np.ndarray,
                        feature_set: Iterable[int]) -> DecompositionTerms:
    """
    Evaluate L(q), L(p*) and D(p*||q) for logits of the optimal predictor
        p* and another linear predictor q over the same feature set

    Args:
        dataset (Dataset): data both predictors are evaluated on
        star_logits (np.ndarray): logits of the converged ridge-free fit
        q_logits (np.ndarray): logits of any predictor over `feature_set`
        feature_set (Iterable[int]): 1-based features both predictors use

    Raises:
        IndexOutOfRange: a feature index is outside 1..d
        LengthMismatch: logit columns do not have n entries

    Returns:
        DecompositionTerms: all terms and |L(q) - L(p*) - D(p*||q)|
    """
    for feature_index in feature_set:
        if not 1 <= feature_index <= dataset.d:
            raise IndexOutOfRange(
                f"Feature index {feature_index} outside 1..{dataset.d}")
    star_vector, q_vector = _paired_vectors(star_logits, q_logits)
    if star_vector.shape[0] != dataset.n:
        raise LengthMismatch(
            f"{star_vector.shape[0]} logits for {dataset.n} samples")

    loss_q = bce_loss(q_vector, dataset.labels)
    loss_star = bce_loss(star_vector, dataset.labels)
    divergence = expected_kl_logits(star_vector, q_vector)
    residual = abs(loss_q - loss_star - divergence)
    return DecompositionTerms(loss_q, loss_star, divergence, residual)


def verify_decomposition(dataset: Dataset, star_logits: np.ndarray,
                         q_logits: np.ndarray,
                         feature_set: Iterable[int]) -> float:
    """
    |L(q) - L(p*) - D(p*||q)|, zero at exact stationarity of p* and of
        order grad_tol * |theta_q - theta*|_1 * B_X for a solver stopped at
        grad_tol
    """
    return decomposition_terms(dataset, star_logits, q_logits,
                               feature_set).residual
