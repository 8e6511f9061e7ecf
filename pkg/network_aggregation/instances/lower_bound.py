"""
Lower-bound analytics and diagnostics for cyclic paths on the hard instance:
noise monotonicity, the 1/(p+1) curve shape and the end-of-pass structure
of protocol runs
"""
import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np

from network_aggregation.domain.agent_graph import AgentGraph, path_order
from network_aggregation.domain.dataset import Dataset
from network_aggregation.errors import InvalidDimension, LengthMismatch
from network_aggregation.instances.hard_instance import (
    LATENT_STREAM, philox_stream, relevance_set, standard_normal)
from network_aggregation.protocol.agent_model import ProtocolTrace
from network_aggregation.protocol.sequential_protocol import (
    logit_feature_weights)
from network_aggregation.solver.logistic_utils import (
    sigmoid, stable_softplus)

logger = logging.getLogger(__name__)

NOISE_STREAM = 2


class NoiseMonotonicity(NamedTuple):
    """
    Monte Carlo losses of c Z + xi at two noise variances, evaluated with
        the same Z and the same standard normal draws behind xi. `margin` is
        the mean paired loss difference in units of its standard error.
    """
    loss_small: float
    loss_large: float
    difference: float
    standard_error: float
    margin: float

    @property
    def strictly_increasing(self) -> bool:
        return self.loss_small < self.loss_large

    def to_dict(self) -> dict:
        return dict(self._asdict())


def conditional_loss(logits: np.ndarray, optimal_logits: np.ndarray
                     ) -> np.ndarray:
    """
    E[l(z, y) | Z] = -sigma(Z) z + softplus(z), the BCE with the label
        integrated out
    """
    return -sigmoid(optimal_logits) * logits + stable_softplus(logits)


def noise_monotonicity_check(c: float, v_small: float, v_large: float,
                             n_mc: int, seed: int) -> NoiseMonotonicity:
    """
    Compare L(c Z + xi_v) at v_small and v_large with common random numbers

    xi_v = sqrt(v) eps shares eps across both variances, so equal variances
    give identical losses and the paired differences have a small variance.

    Args:
        c (float): scaling of the signal
        v_small (float): smaller noise variance, >= 0
        v_large (float): larger noise variance, >= v_small
        n_mc (int): Monte Carlo sample count
        seed (int): seed of the Z and eps streams

    Raises:
        InvalidDimension: negative or unordered variances, n_mc < 2

    Returns:
        NoiseMonotonicity: both losses and the paired margin
    """
    if v_small < 0 or v_large < v_small:
        raise InvalidDimension(
            f"Need 0 <= v_small <= v_large, got {v_small} and {v_large}")
    if n_mc < 2:
        raise InvalidDimension(f"n_mc must be >= 2, got {n_mc}")
    latents = standard_normal(philox_stream(seed, LATENT_STREAM), n_mc)
    noise = standard_normal(philox_stream(seed, NOISE_STREAM), n_mc)

    losses_small = conditional_loss(c * latents + np.sqrt(v_small) * noise,
                                    latents)
    losses_large = conditional_loss(c * latents + np.sqrt(v_large) * noise,
                                    latents)
    differences = losses_large - losses_small
    difference = float(np.mean(differences))
    standard_error = float(np.std(differences, ddof=1) / np.sqrt(n_mc))
    if standard_error > 0:
        margin = difference / standard_error
    else:
        margin = 0.0 if difference == 0 else np.sign(difference) * np.inf
    return NoiseMonotonicity(float(np.mean(losses_small)),
                             float(np.mean(losses_large)), difference,
                             standard_error, float(margin))


def _check_passes(passes: Sequence[int]) -> np.ndarray:
    pass_array = np.asarray(passes, dtype=np.float64)
    if np.any(pass_array < 1):
        raise InvalidDimension(f"Pass indices must be >= 1, got {passes}")
    return pass_array


def predicted_excess_curve(k: int, passes: Sequence[int]) -> np.ndarray:
    """
    Unnormalized lower bound shape 1/(p+1) per pass, p = D / k

    Raises:
        InvalidDimension: k < 2 or a pass index < 1
    """
    if k < 2:
        raise InvalidDimension(f"Hard instance needs k >= 2, got {k}")
    return 1.0 / (_check_passes(passes) + 1.0)


def lower_bound_quadratic(c: float, p: float) -> float:
    """
    (1 - c)^2 + c^2 / p, minimized at c = p / (p + 1) with value 1/(p+1)
    """
    return (1.0 - c) ** 2 + c ** 2 / p


def fit_curve_constant(passes: Sequence[int], excess: Sequence[float],
                       anchor: int = 1) -> float:
    """
    Constant C such that C / (p + 1) passes through the anchor pass

    Raises:
        LengthMismatch: passes and excess differ in length
        InvalidDimension: the anchor pass is not among `passes`
    """
    pass_list = [int(p) for p in passes]
    if len(pass_list) != len(excess):
        raise LengthMismatch(
            f"{len(pass_list)} passes for {len(excess)} excess values")
    if anchor not in pass_list:
        raise InvalidDimension(f"Anchor pass {anchor} is not in {pass_list}")
    return float(excess[pass_list.index(anchor)]) * (anchor + 1.0)


def curve_relative_errors(passes: Sequence[int], excess: Sequence[float],
                          constant: float) -> np.ndarray:
    """
    |excess - C/(p+1)| / (C/(p+1)) per pass
    """
    prediction = constant / (_check_passes(passes) + 1.0)
    return np.abs(np.asarray(excess, dtype=np.float64) - prediction) / \
        prediction


class PassDiagnostics(NamedTuple):
    """
    Structure of the logit published at the end of pass p: its slope on Z_k,
        its exact coefficients over x_1..x_k and the largest coefficient
        magnitude outside the relevance set I_p
    """
    p: int
    agent_id: int
    slope: float
    feature_weights: np.ndarray
    outside_max: float
    loss: float

    def to_dict(self) -> dict:
        return {"p": self.p,
                "agent_id": self.agent_id,
                "slope": self.slope,
                "feature_weights": [float(weight)
                                    for weight in self.feature_weights],
                "outside_max": self.outside_max,
                "loss": self.loss}


def pass_diagnostics(trace: ProtocolTrace, graph: AgentGraph,
                     dataset: Dataset, k: int,
                     p: int) -> PassDiagnostics:
    """
    Diagnose the end-of-pass-p agent A_{pk} of a cyclic path run

    Args:
        trace (ProtocolTrace): protocol trace on a hard instance
        graph (AgentGraph): cyclic path with at least p k agents
        dataset (Dataset): hard instance dataset with latents
        k (int): dimension
        p (int): pass index, 1 <= p <= k

    Raises:
        NotAPath: the graph is not a path
        InvalidDimension: p outside 1..k, the path is shorter than p k or
            the dataset has no latents

    Returns:
        PassDiagnostics: slope on Z_k, weights and outside-I_p magnitude
    """
    relevant = set(relevance_set(k, p))
    order = path_order(graph)
    if len(order) < p * k:
        raise InvalidDimension(
            f"Path of {len(order)} agents has no end of pass {p} for k={k}")
    if dataset.latents is None:
        raise InvalidDimension("Pass diagnostics need the latent columns")

    agent_id = order[p * k - 1]
    logits = trace.logits_of(agent_id)
    signal = dataset.latents[:, k - 1]
    slope = float(signal @ logits / (signal @ signal))
    feature_weights = logit_feature_weights(trace, graph, agent_id)[:k]
    outside = [abs(feature_weights[index - 1]) for index in range(1, k + 1)
               if index not in relevant]
    outside_max = float(max(outside)) if outside else 0.0
    logger.debug("pass %d agent %d slope %.4f outside max %.4f", p,
                 agent_id, slope, outside_max)
    return PassDiagnostics(p, agent_id, slope, feature_weights, outside_max,
                           trace.losses[agent_id])


def end_of_pass_losses(trace: ProtocolTrace, graph: AgentGraph, k: int,
                       passes: Optional[Sequence[int]] = None
                       ) -> np.ndarray:
    """
    Losses of agents A_k, A_2k, ... (or of the listed passes) on a path
    """
    order = path_order(graph)
    if passes is None:
        passes = range(1, len(order) // k + 1)
    return np.array([trace.losses[order[p * k - 1]] for p in passes])
