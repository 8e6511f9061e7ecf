"""
M-coverage: every window of M consecutive path agents jointly observes all d
features
"""
from typing import NamedTuple, Optional

from network_aggregation.domain.agent_graph import AgentGraph, path_order
from network_aggregation.errors import InvalidDimension


class CoverageResult(NamedTuple):
    """
    Outcome of an M-coverage check, `first_violation` is the 1-based start
        position of the first window missing a feature
    """
    covered: bool
    first_violation: Optional[int] = None

    def __bool__(self):
        return self.covered


def check_m_coverage(graph: AgentGraph, window: int,
                     d: Optional[int] = None) -> CoverageResult:
    """
    Check whether every contiguous window of `window` path agents observes
        all of the features 1..d

    Args:
        graph (AgentGraph): simple path
        window (int): window length M, 1 <= M <= path length
        d (int, optional): feature count, defaults to graph.d

    Raises:
        NotAPath: the graph is not a simple path
        InvalidDimension: M is outside 1..path length

    Returns:
        CoverageResult: covered flag and smallest violating window start
    """
    order = path_order(graph)
    if d is None:
        d = graph.d
    if not 1 <= window <= len(order):
        raise InvalidDimension(
            f"Window M={window} must lie in 1..{len(order)}")

    all_features = set(range(1, d + 1))
    for start in range(len(order) - window + 1):
        observed = set()
        for agent in order[start:start + window]:
            observed.update(graph.features_of(agent))
        if not all_features <= observed:
            return CoverageResult(False, start + 1)
    return CoverageResult(True, None)


def minimal_coverage_window(graph: AgentGraph) -> Optional[int]:
    """
    Smallest M for which the path is M-covered, None if even the whole path
        misses a feature
    """
    order = path_order(graph)
    for window in range(1, len(order) + 1):
        if check_m_coverage(graph, window).covered:
            return window
    return None
