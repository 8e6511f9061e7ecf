"""
TheoryReport: the measured constants of a path run next to the bounds they
instantiate
"""
import logging
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from network_aggregation.errors import InvalidDimension, LengthMismatch
from network_aggregation.metrics.bounds import (
    coefficient_l1, convergence_bound_rhs, feature_scale, residual_bound_rhs,
    residual_lhs, stable_block)

logger = logging.getLogger(__name__)


class TheoryReport(NamedTuple):
    """
    Bound inputs (B_X, B_g, M, D, epsilon), the two right hand sides and
        the measured quantities they are compared against. When the path is
        not M-covered, the bound fields are NaN and the `*_held` flags None.
    """
    B_X: float
    B_g: float
    M: int
    D: int
    epsilon: float
    rhs_residual_bound: float
    rhs_convergence_bound: float
    covered: bool = True
    sink_excess: float = math.nan
    residual_lhs: float = math.nan
    stable_block_index: int = 0
    residual_bound_held: Optional[bool] = None
    convergence_bound_held: Optional[bool] = None

    def to_dict(self) -> dict:
        """
        Convert into a JSON serializable dictionary, NaN becomes None
        """
        report_dict = {}
        for key, value in self._asdict().items():
            if isinstance(value, float) and math.isnan(value):
                value = None
            report_dict[key] = value
        return report_dict


def build_theory_report(features: np.ndarray, labels: np.ndarray,
                        path_logits: Sequence[np.ndarray],
                        path_losses: Sequence[float],
                        global_weights: np.ndarray,
                        global_logits: np.ndarray, global_loss: float,
                        window: int, covered: bool) -> TheoryReport:
    """
    Fill a TheoryReport for a protocol run on a path

    The comparator of the residual bound is the global fit p*, so B_g is
    B_{p*}. The residual bound is checked on the stable block: epsilon is
    the block's loss drop and the measured side is |E[(p_t - y) z_{p*}]| at
    the block's last agent.

    Args:
        features (np.ndarray): n x d feature matrix, used for B_X
        labels (np.ndarray): length n labels
        path_logits (Sequence[np.ndarray]): logit columns in path order
        path_losses (Sequence[float]): losses in path order
        global_weights (np.ndarray): weights of the all-features fit
        global_logits (np.ndarray): logits of the all-features fit
        global_loss (float): loss of the all-features fit
        window (int): coverage window M
        covered (bool): whether the path is M-covered

    Raises:
        LengthMismatch: logits and losses describe different path lengths
        InvalidDimension: M outside 1..D

    Returns:
        TheoryReport: measured constants, bounds and verdicts
    """
    depth = len(path_losses)
    if len(path_logits) != depth:
        raise LengthMismatch(
            f"{len(path_logits)} logit columns for {depth} losses")
    if not 1 <= window <= depth:
        raise InvalidDimension(f"Window M={window} must lie in 1..{depth}")

    feature_bound = feature_scale(features)
    optimum_bound = coefficient_l1(global_weights)
    block = stable_block(path_losses, window)
    sink_excess = float(path_losses[-1] - global_loss)
    measured_residual = residual_lhs(path_logits[block.stop - 1], labels,
                                     global_logits)
    epsilon = max(block.drop, 0.0)

    if not covered:
        return TheoryReport(feature_bound, optimum_bound, window, depth,
                            epsilon, math.nan, math.nan, False, sink_excess,
                            measured_residual, block.index)

    rhs_residual = residual_bound_rhs(optimum_bound, feature_bound, window,
                                      epsilon)
    rhs_convergence = convergence_bound_rhs(optimum_bound, feature_bound,
                                            window, depth)
    residual_held = measured_residual <= rhs_residual
    convergence_held = sink_excess <= rhs_convergence
    if not convergence_held:
        logger.warning("Sink excess %.3e exceeds the convergence bound %.3e "
                       "(M=%d, D=%d)", sink_excess, rhs_convergence, window,
                       depth)
    return TheoryReport(feature_bound, optimum_bound, window, depth, epsilon,
                        rhs_residual, rhs_convergence, True, sink_excess,
                        measured_residual, block.index, residual_held,
                        convergence_held)
