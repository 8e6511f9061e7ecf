"""
A Module that contains the AgentGraph, the DAG that agents learn along

Agents are numbered 1..N and features 1..d in every public interface.
Topological order is computed with Kahn's algorithm, always releasing the
smallest ready agent id first so the order is deterministic.
"""
import heapq
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Sequence, Set, Tuple, Union

from network_aggregation.errors import (
    CycleDetected, IndexOutOfRange, InvalidDimension, InvalidGraph, NotAPath)
from network_aggregation.utils.file_utils import atomic_write_json

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
FeatureSet = Tuple[int, ...]


class AgentGraph(NamedTuple):
    """
    Immutable DAG of agents, each with its feature subset S_i and ordered
        parent list
    """
    num_agents: int
    d: int
    feature_sets: Tuple[FeatureSet, ...]
    parents: Tuple[Tuple[int, ...], ...]
    topo_order: Tuple[int, ...]

    def features_of(self, agent_id: int) -> FeatureSet:
        """
        Ascending 1-based feature indices observed by `agent_id`
        """
        self._check_agent(agent_id)
        return self.feature_sets[agent_id - 1]

    def parents_of(self, agent_id: int) -> Tuple[int, ...]:
        """
        Parents of `agent_id` in declared order
        """
        self._check_agent(agent_id)
        return self.parents[agent_id - 1]

    def children(self, agent_id: int) -> List[int]:
        """
        Agents that list `agent_id` as a parent, ascending
        """
        self._check_agent(agent_id)
        return [child for child in range(1, self.num_agents + 1)
                if agent_id in self.parents[child - 1]]

    def edges(self) -> List[Edge]:
        """
        Edge list (parent, child), grouped by child in id order with parents
            in declared order. Rebuilding from it reproduces this graph.
        """
        return [(parent, child) for child in range(1, self.num_agents + 1)
                for parent in self.parents[child - 1]]

    def sinks(self) -> List[int]:
        """
        Agents without children, in topological order
        """
        has_child: Set[int] = {parent for parent_list in self.parents
                               for parent in parent_list}
        return [agent for agent in self.topo_order if agent not in has_child]

    def is_path(self) -> bool:
        """
        True when the graph is a simple path A_1 -> ... -> A_N in topological
            order
        """
        try:
            path_order(self)
        except NotAPath:
            return False
        return True

    def _check_agent(self, agent_id: int):
        if not 1 <= agent_id <= self.num_agents:
            raise IndexOutOfRange(
                f"Agent id {agent_id} outside 1..{self.num_agents}")


def _topological_order(num_agents: int,
                       parents: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    children: Dict[int, List[int]] = {agent: []
                                      for agent in range(1, num_agents + 1)}
    in_degree = {agent: len(parents[agent - 1])
                 for agent in range(1, num_agents + 1)}
    for child in range(1, num_agents + 1):
        for parent in parents[child - 1]:
            children[parent].append(child)

    ready = [agent for agent, degree in in_degree.items() if degree == 0]
    heapq.heapify(ready)
    order: List[int] = []
    while ready:
        agent = heapq.heappop(ready)
        order.append(agent)
        for child in children[agent]:
            in_degree[child] -= 1
            if in_degree[child] == 0:
                heapq.heappush(ready, child)

    if len(order) != num_agents:
        stuck = sorted(agent for agent, degree in in_degree.items()
                       if degree > 0)
        raise CycleDetected(f"Edges contain a cycle through agents {stuck}")
    return tuple(order)


def build_agent_graph(edges: Iterable[Edge],
                      feature_sets: Sequence[Iterable[int]],
                      d: int) -> AgentGraph:
    """
    Validate an edge list and per-agent feature sets into an AgentGraph

    Args:
        edges (Iterable[Edge]): (parent id, child id) pairs, 1-based
        feature_sets (Sequence[Iterable[int]]): S_i for agents 1..N, the
            number of agents N is len(feature_sets)
        d (int): total number of features

    Raises:
        IndexOutOfRange: an agent id is outside 1..N or a feature index is
            outside 1..d
        InvalidGraph: an edge is repeated
        CycleDetected: the edges contain a directed cycle

    Returns:
        AgentGraph: graph with deterministic topological order, parents in
            input order
    """
    if d < 0:
        raise IndexOutOfRange(f"Feature count d must be >= 0, got {d}")
    num_agents = len(feature_sets)

    normalized_sets: List[FeatureSet] = []
    for agent_index, feature_set in enumerate(feature_sets, start=1):
        indices = sorted(set(int(index) for index in feature_set))
        for feature_index in indices:
            if not 1 <= feature_index <= d:
                raise IndexOutOfRange(
                    f"Agent {agent_index} observes feature {feature_index} "
                    f"outside 1..{d}")
        normalized_sets.append(tuple(indices))

    parents: List[List[int]] = [[] for _ in range(num_agents)]
    for parent, child in edges:
        parent, child = int(parent), int(child)
        for agent_id in (parent, child):
            if not 1 <= agent_id <= num_agents:
                raise IndexOutOfRange(
                    f"Edge ({parent}, {child}) references agent {agent_id} "
                    f"outside 1..{num_agents}")
        if parent == child:
            raise CycleDetected(f"Agent {parent} has a self loop")
        if parent in parents[child - 1]:
            raise InvalidGraph(f"Edge ({parent}, {child}) is repeated")
        parents[child - 1].append(parent)

    topo_order = _topological_order(num_agents, parents)
    logger.debug("Built graph with %d agents, topo order %s", num_agents,
                 topo_order)
    return AgentGraph(num_agents, d, tuple(normalized_sets),
                      tuple(tuple(parent_list) for parent_list in parents),
                      topo_order)


def path_order(graph: AgentGraph) -> List[int]:
    """
    The agents of a simple path in source to sink order

    Args:
        graph (AgentGraph): graph that should be a simple path

    Raises:
        NotAPath: the graph has more than one source, an agent with more than
            one parent, or an agent whose parent is not its predecessor

    Returns:
        List[int]: agent ids along the path
    """
    order = list(graph.topo_order)
    if not order:
        raise NotAPath("Graph has no agents")
    if graph.parents_of(order[0]):
        raise NotAPath(f"Source agent {order[0]} has parents")
    for previous, agent in zip(order, order[1:]):
        agent_parents = graph.parents_of(agent)
        if len(agent_parents) != 1:
            raise NotAPath(
                f"Agent {agent} has {len(agent_parents)} parents, a path "
                "agent needs exactly 1")
        if agent_parents[0] != previous:
            raise NotAPath(
                f"Agent {agent} follows {agent_parents[0]}, not the previous "
                f"path agent {previous}")
    return order


def cyclic_path_assignment(k: int, depth: int) -> AgentGraph:
    """
    Path of `depth` agents observing the k features one at a time in a
        repeating cyclic order, agent i observes x_{((i-1) mod k)+1}

    Args:
        k (int): number of features, at least 2
        depth (int): number of agents D, at least 1

    Raises:
        InvalidDimension: k < 2 or depth < 1

    Returns:
        AgentGraph: the path A_1 -> ... -> A_D
    """
    if k < 2:
        raise InvalidDimension(f"Cyclic assignment needs k >= 2, got {k}")
    if depth < 1:
        raise InvalidDimension(f"Path depth must be >= 1, got {depth}")
    feature_sets = [{((agent - 1) % k) + 1} for agent in range(1, depth + 1)]
    edges = [(agent - 1, agent) for agent in range(2, depth + 1)]
    return build_agent_graph(edges, feature_sets, k)


def load_agent_graph(path: Union[str, Path]) -> AgentGraph:
    """
    Load a graph description file

    The file format is
        {"d": int, "agents": [{"id": int, "features": [int],
                               "parents": [int]}]}

    Args:
        path (str | Path): path to the JSON file

    Raises:
        InvalidGraph: the ids are not a permutation of 1..N or a key is
            missing

    Returns:
        AgentGraph: validated graph
    """
    with open(path, "r", encoding="utf-8") as graph_file:
        graph_dict = json.load(graph_file)
    return graph_from_dict(graph_dict)


def graph_from_dict(graph_dict: dict) -> AgentGraph:
    """
    Build an AgentGraph from the graph description dictionary
    """
    try:
        d = int(graph_dict["d"])
        agents = sorted(graph_dict["agents"], key=lambda agent: agent["id"])
        ids = [int(agent["id"]) for agent in agents]
        if ids != list(range(1, len(agents) + 1)):
            raise InvalidGraph(f"Agent ids must be 1..N, got {ids}")
        feature_sets = [agent["features"] for agent in agents]
        edges = [(int(parent), int(agent["id"])) for agent in agents
                 for parent in agent.get("parents", [])]
    except KeyError as exception_handle:
        raise InvalidGraph(
            f"Graph description is missing key {exception_handle}"
        ) from exception_handle
    return build_agent_graph(edges, feature_sets, d)


def graph_to_dict(graph: AgentGraph) -> dict:
    """
    Convert an AgentGraph into the graph description dictionary
    """
    return {"d": graph.d,
            "agents": [{"id": agent,
                        "features": list(graph.feature_sets[agent - 1]),
                        "parents": list(graph.parents[agent - 1])}
                       for agent in range(1, graph.num_agents + 1)]}


def dump_agent_graph(graph: AgentGraph, path: Union[str, Path]):
    """
    Write `graph` in the graph description format
    """
    atomic_write_json(path, graph_to_dict(graph))
