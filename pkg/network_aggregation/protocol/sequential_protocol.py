"""
The sequential logit passing protocol

Agents are fitted one at a time in topological order. Agent i sees its own
features x_{S_i} and the logit columns z_j of its parents and fits
z_i = w_i^T x_{S_i} + sum_j v_ij z_j by minimizing the empirical BCE.
"""
import logging
from typing import Dict, Optional

import numpy as np

from network_aggregation.domain.agent_graph import AgentGraph
from network_aggregation.domain.dataset import Dataset
from network_aggregation.errors import (
    DimensionMismatch, IndexOutOfRange, MissingParent, warn_not_converged)
from network_aggregation.protocol.agent_model import AgentModel, ProtocolTrace
from network_aggregation.solver.logistic_solver import (
    FitOptions, FitResult, fit_logistic)
from network_aggregation.solver.logistic_utils import (
    bce_loss, residual_moments)

logger = logging.getLogger(__name__)


def agent_design(dataset: Dataset, graph: AgentGraph, agent_id: int,
                 trace: ProtocolTrace) -> np.ndarray:
    """
    Design matrix of one agent: its features in ascending index order
        followed by its parents' logit columns in declared parent order

    Args:
        dataset (Dataset): shared dataset
        graph (AgentGraph): agent graph
        agent_id (int): agent to build the design for
        trace (ProtocolTrace): trace holding every parent's logits

    Raises:
        MissingParent: a parent has not published its logits yet

    Returns:
        np.ndarray: n x (|S_i| + |Pa(A_i)|) design matrix
    """
    feature_columns = dataset.columns(graph.features_of(agent_id))
    parent_ids = graph.parents_of(agent_id)
    for parent in parent_ids:
        if parent not in trace:
            raise MissingParent(
                f"Agent {agent_id} needs the logits of parent {parent}, "
                "which has not been fitted")
    if not parent_ids:
        return feature_columns
    parent_columns = np.column_stack(
        [trace.logits_of(parent) for parent in parent_ids])
    return np.hstack([feature_columns, parent_columns])


def _warm_start(graph: AgentGraph, agent_id: int,
                trace: ProtocolTrace) -> Optional[np.ndarray]:
    # Pass the best parent's logit through unchanged (v = 1, w = 0)
    parent_ids = graph.parents_of(agent_id)
    if not parent_ids:
        return None
    feature_count = len(graph.features_of(agent_id))
    best_parent = min(range(len(parent_ids)),
                      key=lambda index: trace.losses[parent_ids[index]])
    initial_weights = np.zeros(feature_count + len(parent_ids))
    initial_weights[feature_count + best_parent] = 1.0
    return initial_weights


def run_protocol(dataset: Dataset, graph: AgentGraph,
                 opts: FitOptions = FitOptions()) -> ProtocolTrace:
    """
    Fit every agent of `graph` in topological order

    Each fit is warm started from passing its lowest-loss parent's logit
    through, so an agent's loss never exceeds its parents' losses beyond
    rounding. Agents whose fit did not converge are kept and flagged.

    Args:
        dataset (Dataset): shared dataset
        graph (AgentGraph): agent graph
        opts (FitOptions, optional): solver options for every agent.
            Defaults to FitOptions().

    Raises:
        DimensionMismatch: the graph references more features than the
            dataset holds
        NonFinite: propagated from the solver

    Returns:
        ProtocolTrace: complete trace in topological order
    """
    if graph.d > dataset.d:
        raise DimensionMismatch(
            f"Graph uses d={graph.d} features, dataset only has {dataset.d}")
    trace = ProtocolTrace(graph.topo_order, dataset.n)

    for agent_id in graph.topo_order:
        design = agent_design(dataset, graph, agent_id, trace)
        fit = fit_logistic(design, dataset.labels, opts,
                           initial_weights=_warm_start(graph, agent_id,
                                                       trace))
        feature_count = len(graph.features_of(agent_id))
        model = AgentModel(agent_id, graph.features_of(agent_id),
                           graph.parents_of(agent_id),
                           fit.weights[:feature_count],
                           fit.weights[feature_count:], fit.loss,
                           fit.grad_norm, fit.converged, fit.iterations,
                           fit.intercept, fit.diagnostic)
        trace.record(model, fit.logits(design))
        logger.debug("agent %d loss %.12f grad %.3e iterations %d", agent_id,
                     fit.loss, fit.grad_norm, fit.iterations)
        if not fit.converged:
            logger.info("agent %d did not converge: %s", agent_id,
                        fit.diagnostic)

    if not trace.all_converged:
        logger.warning("%d of %d agent fits did not converge",
                       len(trace.unconverged_agents()), len(trace.order))
    return trace


def fit_global(dataset: Dataset, opts: FitOptions = FitOptions()
               ) -> FitResult:
    """
    Reference fit over all d features, the comparator p* of the excess loss
    """
    return fit_logistic(dataset.features, dataset.labels, opts)


def sink_excess_loss(trace: ProtocolTrace, dataset: Dataset,
                     global_fit: FitResult,
                     sink: Optional[int] = None) -> float:
    """
    L(p_sink) - L(p*)

    Args:
        trace (ProtocolTrace): complete protocol trace
        dataset (Dataset): dataset the trace and the global fit were run on
        global_fit (FitResult): all-features fit on `dataset`
        sink (int, optional): agent to report, defaults to the last agent in
            topological order

    Raises:
        MissingParent: the sink has not been fitted
        DimensionMismatch: the trace was run on a different sample count

    Returns:
        float: excess loss, >= -10 grad_tol when both fits converged
    """
    if trace.sample_count != dataset.n:
        raise DimensionMismatch(
            f"Trace over {trace.sample_count} samples, dataset has "
            f"{dataset.n}")
    if sink is None:
        sink = trace.order[-1]
    if sink not in trace:
        raise MissingParent(f"Sink {sink} has not been fitted")
    if not trace.models[sink].converged:
        warn_not_converged(f"Sink agent {sink} did not converge")
    if not global_fit.converged:
        warn_not_converged("Global all-features fit did not converge")
    return trace.losses[sink] - global_fit.loss


def sink_excess_losses(trace: ProtocolTrace, graph: AgentGraph,
                       dataset: Dataset,
                       global_fit: FitResult) -> Dict[int, float]:
    """
    Excess loss of every sink of a (possibly multi-sink) DAG
    """
    return {sink: sink_excess_loss(trace, dataset, global_fit, sink)
            for sink in graph.sinks()}


def logit_feature_weights(trace: ProtocolTrace, graph: AgentGraph,
                          agent_id: int) -> np.ndarray:
    """
    Coefficients over x_1..x_d of an agent's logit, found by substituting
        each parent's own feature-space coefficients for its logit

    Every logit in the protocol is linear in the features, so
    z_i = sum_l beta_l x_l exactly (intercepts are not included).

    Args:
        trace (ProtocolTrace): trace containing the agent and its ancestors
        graph (AgentGraph): agent graph of the trace
        agent_id (int): agent to expand

    Raises:
        MissingParent: the agent or an ancestor has not been fitted

    Returns:
        np.ndarray: length d coefficient vector beta
    """
    expanded: Dict[int, np.ndarray] = {}
    for current in graph.topo_order:
        if current not in trace:
            continue
        model = trace.models[current]
        coefficients = np.zeros(graph.d)
        for weight, feature_index in zip(model.w, model.feature_indices):
            coefficients[feature_index - 1] += weight
        for weight, parent in zip(model.v, model.parent_ids):
            coefficients += weight * expanded[parent]
        expanded[current] = coefficients
        if current == agent_id:
            return coefficients
    if not 1 <= agent_id <= graph.num_agents:
        raise IndexOutOfRange(
            f"Agent id {agent_id} outside 1..{graph.num_agents}")
    raise MissingParent(f"Agent {agent_id} has not been fitted")


def replay_logits(trace: ProtocolTrace, graph: AgentGraph,
                  dataset: Dataset) -> Dict[int, np.ndarray]:
    """
    Apply the fitted models of `trace` to another dataset with the same
        features, agent by agent in topological order
    """
    replayed = ProtocolTrace(trace.order, dataset.n)
    for agent_id in trace.order:
        model = trace.models[agent_id]
        design = agent_design(dataset, graph, agent_id, replayed)
        replayed.record(model, design @ model.weights + model.intercept)
    return dict(replayed.logit_columns)


def evaluate_trace(trace: ProtocolTrace, graph: AgentGraph,
                   dataset: Dataset) -> Dict[int, float]:
    """
    Out-of-sample loss of every agent's fitted model on `dataset`

    Args:
        trace (ProtocolTrace): complete trace fitted on another sample
        graph (AgentGraph): agent graph of the trace
        dataset (Dataset): fresh evaluation sample

    Returns:
        Dict[int, float]: per-agent BCE on `dataset`
    """
    return {agent_id: bce_loss(logits, dataset.labels)
            for agent_id, logits in replay_logits(trace, graph,
                                                  dataset).items()}


def max_loss_increase(trace: ProtocolTrace, graph: AgentGraph) -> float:
    """
    Largest L(child) - L(parent) over all edges, <= 0 up to solver slack
        since passing a parent's logit through is always feasible
    """
    increases = [trace.losses[child] - trace.losses[parent]
                 for parent, child in graph.edges()]
    if not increases:
        return 0.0
    return float(max(increases))


def max_residual_moment(trace: ProtocolTrace, graph: AgentGraph,
                        dataset: Dataset, converged_only: bool = True
                        ) -> float:
    """
    Largest |mean(column * (sigma(z_i) - y))| over every agent's own design
        columns at its fitted logits
    """
    largest = 0.0
    for agent_id in trace.order:
        if converged_only and not trace.models[agent_id].converged:
            continue
        design = agent_design(dataset, graph, agent_id, trace)
        if design.shape[1] == 0:
            continue
        moments = residual_moments(design, trace.logits_of(agent_id),
                                   dataset.labels)
        largest = max(largest, float(np.max(np.abs(moments))))
    return largest
