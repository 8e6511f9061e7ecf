"""
Numerically stable building blocks of the logistic model

All losses use the pointwise form l(z, y) = softplus(z) - y z, which for
y in {0, 1} equals softplus((1 - 2y) z) and is therefore never negative.
"""
from typing import Tuple, Union

import numpy as np
from scipy.special import expit

from network_aggregation.errors import DimensionMismatch, LengthMismatch

ArrayLike = Union[float, np.ndarray]


def sigmoid(logits: ArrayLike) -> ArrayLike:
    """
    Logistic function sigma(z) = 1 / (1 + e^-z), overflow free

    Args:
        logits (ArrayLike): scalar or array of logits

    Returns:
        ArrayLike: probabilities with the same shape as `logits`
    """
    return expit(logits)


def stable_softplus(logits: ArrayLike) -> ArrayLike:
    """
    softplus(z) = log(1 + e^z) evaluated as max(z, 0) + log1p(e^-|z|)

    The two branches share the log1p term, so softplus(z) - softplus(-z) = z
    up to a single rounding.

    Args:
        logits (ArrayLike): finite scalar or array

    Returns:
        ArrayLike: softplus of `logits`, a float for scalar input
    """
    logit_array = np.asarray(logits, dtype=np.float64)
    result = (np.maximum(logit_array, 0.0)
              + np.log1p(np.exp(-np.abs(logit_array))))
    if result.ndim == 0:
        return float(result)
    return result


def _as_vector(values: np.ndarray, name: str) -> np.ndarray:
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise DimensionMismatch(
            f"{name} must be a vector, got shape {vector.shape}")
    return vector


def pointwise_loss(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """
    l(z_i, y_i) for every row

    Raises:
        LengthMismatch: logits and labels differ in length
    """
    logit_vector = _as_vector(logits, "logits")
    label_vector = _as_vector(labels, "labels")
    if logit_vector.shape != label_vector.shape:
        raise LengthMismatch(
            f"{logit_vector.shape[0]} logits for {label_vector.shape[0]} "
            "labels")
    return stable_softplus((1.0 - 2.0 * label_vector) * logit_vector)


def bce_loss(logits: np.ndarray, labels: np.ndarray) -> float:
    """
    Empirical binary cross entropy (1/n) sum softplus(z_i) - y_i z_i

    Args:
        logits (np.ndarray): length n logits
        labels (np.ndarray): length n labels in {0, 1}

    Raises:
        LengthMismatch: lengths differ or are zero

    Returns:
        float: mean BCE, log 2 for all-zero logits
    """
    losses = pointwise_loss(logits, labels)
    if losses.shape[0] == 0:
        raise LengthMismatch("bce_loss needs at least one sample")
    return float(np.mean(losses))


def predict_logits(weights: np.ndarray, design: np.ndarray) -> np.ndarray:
    """
    Row-wise inner products design @ weights

    Args:
        weights (np.ndarray): length m weights
        design (np.ndarray): n x m design matrix

    Raises:
        DimensionMismatch: column count differs from the weight length

    Returns:
        np.ndarray: length n logits
    """
    weight_vector = _as_vector(weights, "weights")
    design_matrix = np.asarray(design, dtype=np.float64)
    if design_matrix.ndim != 2 or design_matrix.shape[1] != \
            weight_vector.shape[0]:
        raise DimensionMismatch(
            f"design of shape {design_matrix.shape} does not match "
            f"{weight_vector.shape[0]} weights")
    if weight_vector.shape[0] == 0:
        return np.zeros(design_matrix.shape[0])
    return design_matrix @ weight_vector


def residual_moments(design: np.ndarray, logits: np.ndarray,
                     labels: np.ndarray) -> np.ndarray:
    """
    Per-column empirical moments mean(x_l (sigma(z) - y)), which are the
        gradient of the empirical BCE with respect to the column weights

    Args:
        design (np.ndarray): n x m design matrix
        logits (np.ndarray): length n logits
        labels (np.ndarray): length n labels

    Raises:
        DimensionMismatch: row counts disagree

    Returns:
        np.ndarray: length m moments
    """
    design_matrix = np.asarray(design, dtype=np.float64)
    logit_vector = _as_vector(logits, "logits")
    label_vector = _as_vector(labels, "labels")
    if design_matrix.ndim != 2 or not (
            design_matrix.shape[0] == logit_vector.shape[0]
            == label_vector.shape[0]):
        raise DimensionMismatch(
            f"design {design_matrix.shape}, logits {logit_vector.shape} and "
            f"labels {label_vector.shape} do not align")
    residuals = sigmoid(logit_vector) - label_vector
    return design_matrix.T @ residuals / design_matrix.shape[0]


def bce_objective(weights: np.ndarray, design: np.ndarray,
                  labels: np.ndarray, ridge: float = 0.0
                  ) -> Tuple[float, np.ndarray]:
    """
    Ridge regularized empirical BCE and its analytic gradient

    Args:
        weights (np.ndarray): length m weights
        design (np.ndarray): n x m design matrix
        labels (np.ndarray): length n labels
        ridge (float, optional): penalty ridge * |w|^2 / 2. Defaults to 0.

    Returns:
        Tuple[float, np.ndarray]: (objective, gradient)
    """
    weight_vector = _as_vector(weights, "weights")
    logits = predict_logits(weight_vector, design)
    loss = bce_loss(logits, labels)
    gradient = residual_moments(design, logits, labels)
    if ridge > 0:
        loss += 0.5 * ridge * float(weight_vector @ weight_vector)
        gradient = gradient + ridge * weight_vector
    return loss, gradient
