"""
Bound calculators for covered paths: the residual bound, the O(M/sqrt(D))
convergence bound and the stable block (pigeonhole) diagnostic, plus the
measured quantities they are compared against
"""
import math
from typing import List, NamedTuple, Sequence

import numpy as np

from network_aggregation.errors import InvalidDimension, LengthMismatch
from network_aggregation.metrics.divergence import expected_kl_logits
from network_aggregation.solver.logistic_utils import bce_loss, sigmoid


def residual_bound_rhs(coefficient_bound: float, feature_bound: float,
                       path_length: int, epsilon: float) -> float:
    """
    B_g B_X sqrt(k epsilon / 2), the bound on |E[(p_k - y) z_g]| for a path
        of k agents that observes every feature and loses at most epsilon

    Raises:
        InvalidDimension: any argument is negative
    """
    for name, value in (("B_g", coefficient_bound), ("B_X", feature_bound),
                        ("k", path_length), ("epsilon", epsilon)):
        if value < 0:
            raise InvalidDimension(f"{name} must be >= 0, got {value}")
    return coefficient_bound * feature_bound * math.sqrt(
        path_length * epsilon / 2.0)


def convergence_bound_rhs(optimum_bound: float, feature_bound: float,
                          window: int, depth: int) -> float:
    """
    B_{p*} B_X M / sqrt(D), the excess loss bound for the last agent of an
        M-covered path of depth D

    Raises:
        InvalidDimension: M < 1 or D < M
    """
    if window < 1:
        raise InvalidDimension(f"Window M must be >= 1, got {window}")
    if depth < window:
        raise InvalidDimension(f"Depth D={depth} is smaller than M={window}")
    return optimum_bound * feature_bound * window / math.sqrt(depth)


class StableBlock(NamedTuple):
    """
    The length-M block of a path whose internal loss drop is smallest.
        `index` is 1-based, agents start..stop (1-based, inclusive)
    """
    index: int
    drop: float
    start: int
    stop: int
    block_count: int


def stable_block(losses: Sequence[float], window: int) -> StableBlock:
    """
    Split the path losses into K = floor(D / M) disjoint blocks of M agents
        and return the block with the smallest loss drop (first minus last
        loss inside the block). Ties go to the earliest block.

    By pigeonhole the returned drop is at most losses[0] / K when losses
    are non-increasing.

    Args:
        losses (Sequence[float]): per-agent losses along the path
        window (int): block length M

    Raises:
        InvalidDimension: M < 1 or fewer than M losses

    Returns:
        StableBlock: the stable block
    """
    loss_array = np.asarray(losses, dtype=np.float64)
    if window < 1:
        raise InvalidDimension(f"Window M must be >= 1, got {window}")
    if loss_array.shape[0] < window:
        raise InvalidDimension(
            f"{loss_array.shape[0]} losses cannot hold a block of {window}")
    block_count = loss_array.shape[0] // window
    drops = [float(loss_array[block * window]
                   - loss_array[(block + 1) * window - 1])
             for block in range(block_count)]
    best_block = int(np.argmin(drops))
    return StableBlock(best_block + 1, drops[best_block],
                       best_block * window + 1, (best_block + 1) * window,
                       block_count)


def feature_scale(features: np.ndarray) -> float:
    """
    B_X = max over features of sqrt(mean(x_l^2))
    """
    feature_matrix = np.asarray(features, dtype=np.float64)
    if feature_matrix.shape[1] == 0:
        return 0.0
    return float(np.max(np.sqrt(np.mean(feature_matrix ** 2, axis=0))))


def coefficient_l1(weights: np.ndarray) -> float:
    """
    B_g = sum |alpha_l| of a comparator's coefficients
    """
    return float(np.sum(np.abs(np.asarray(weights, dtype=np.float64))))


def residual_lhs(p_logits: np.ndarray, labels: np.ndarray,
                 comparator_logits: np.ndarray) -> float:
    """
    Measured |mean((p - y) z_g)|, the left side of the residual bound

    Raises:
        LengthMismatch: the columns differ in length
    """
    p_vector = np.asarray(p_logits, dtype=np.float64)
    label_vector = np.asarray(labels, dtype=np.float64)
    comparator = np.asarray(comparator_logits, dtype=np.float64)
    if not p_vector.shape == label_vector.shape == comparator.shape:
        raise LengthMismatch(
            f"columns of shapes {p_vector.shape}, {label_vector.shape} and "
            f"{comparator.shape}")
    return abs(float(np.mean((sigmoid(p_vector) - label_vector)
                             * comparator)))


def loss_convexity_gap(p_logits: np.ndarray, comparator_logits: np.ndarray,
                       labels: np.ndarray) -> float:
    """
    L(g) + |E[(p - y) z_g]| - L(p); non-negative (up to solver slack) when
        p minimizes the loss over a space that contains its own logit
    """
    return (bce_loss(comparator_logits, labels)
            + residual_lhs(p_logits, labels, comparator_logits)
            - bce_loss(p_logits, labels))


class KLChain(NamedTuple):
    """
    Consecutive divergences D(p_{s+1}||p_s) along a path and the loss drop
        L(p_1) - L(p_k) they telescope to
    """
    divergences: List[float]
    total: float
    loss_drop: float

    @property
    def residual(self) -> float:
        return abs(self.total - self.loss_drop)


def path_kl_chain(logit_columns: Sequence[np.ndarray],
                  labels: np.ndarray) -> KLChain:
    """
    Sum of D(p_{s+1}||p_s) for consecutive path agents

    Each agent optimizes over a space containing its predecessor's logit, so
    L(p_s) = L(p_{s+1}) + D(p_{s+1}||p_s) and the sum equals the total loss
    drop along the path.

    Raises:
        InvalidDimension: fewer than one logit column
    """
    if len(logit_columns) < 1:
        raise InvalidDimension("path_kl_chain needs at least one agent")
    divergences = [expected_kl_logits(logit_columns[index + 1],
                                      logit_columns[index])
                   for index in range(len(logit_columns) - 1)]
    loss_drop = (bce_loss(logit_columns[0], labels)
                 - bce_loss(logit_columns[-1], labels))
    return KLChain(divergences, float(sum(divergences)), loss_drop)
