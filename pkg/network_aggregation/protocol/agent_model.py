"""
Per-agent fitted models and the write-once trace the protocol fills in
topological order
"""
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from network_aggregation.errors import IndexOutOfRange, MissingParent


class AgentModel(NamedTuple):
    """
    Fitted parameters of one agent: `w` over its features S_i (ascending)
        and `v` over its parents' logits (declared order), plus the fit
        diagnostics
    """
    agent_id: int
    feature_indices: Tuple[int, ...]
    parent_ids: Tuple[int, ...]
    w: np.ndarray
    v: np.ndarray
    loss: float
    grad_norm: float
    converged: bool
    iterations: int = 0
    intercept: float = 0.0
    diagnostic: Optional[str] = None

    @property
    def weights(self) -> np.ndarray:
        """
        [w, v], the weights over the agent's design columns
        """
        return np.concatenate([self.w, self.v])

    @property
    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    def to_dict(self) -> dict:
        return {"agent_id": self.agent_id,
                "features": list(self.feature_indices),
                "parents": list(self.parent_ids),
                "w": [float(weight) for weight in self.w],
                "v": [float(weight) for weight in self.v],
                "loss": self.loss,
                "grad_norm": self.grad_norm,
                "converged": self.converged,
                "iterations": self.iterations,
                "intercept": self.intercept,
                "diagnostic": self.diagnostic}


class ProtocolTrace:
    """
    Models, logit columns and losses of every agent of one protocol run

    Every agent slot is written exactly once. The published logit columns
    are read-only so downstream agents cannot alter what a parent sent.
    """

    def __init__(self, order: Iterable[int], sample_count: int):
        self.order: Tuple[int, ...] = tuple(order)
        self.sample_count = sample_count
        self.models: Dict[int, AgentModel] = {}
        self.logit_columns: Dict[int, np.ndarray] = {}
        self.losses: Dict[int, float] = {}

    def __contains__(self, agent_id: int) -> bool:
        return agent_id in self.models

    def __len__(self) -> int:
        return len(self.models)

    def __repr__(self) -> str:
        return (f"ProtocolTrace<agents={len(self)}/{len(self.order)}, "
                f"n={self.sample_count}>")

    def record(self, model: AgentModel, logits: np.ndarray):
        """
        Publish an agent's model and logit column

        Args:
            model (AgentModel): fitted model of the agent
            logits (np.ndarray): length n logit column of the agent

        Raises:
            IndexOutOfRange: the agent is not part of this run's order
            ValueError: the slot is already filled or the column has the
                wrong length
        """
        if model.agent_id not in self.order:
            raise IndexOutOfRange(
                f"Agent {model.agent_id} is not part of this trace")
        if model.agent_id in self.models:
            raise ValueError(
                f"Agent {model.agent_id} was already recorded in this trace")
        column = np.array(logits, dtype=np.float64)
        if column.shape != (self.sample_count,):
            raise ValueError(
                f"Logit column of shape {column.shape}, expected "
                f"({self.sample_count},)")
        column.setflags(write=False)
        self.models[model.agent_id] = model
        self.logit_columns[model.agent_id] = column
        self.losses[model.agent_id] = model.loss

    def logits_of(self, agent_id: int) -> np.ndarray:
        """
        Published logit column of `agent_id`

        Raises:
            MissingParent: the agent has not been fitted yet
        """
        try:
            return self.logit_columns[agent_id]
        except KeyError as exception_handle:
            raise MissingParent(
                f"Agent {agent_id} has not published a logit column"
            ) from exception_handle

    @property
    def complete(self) -> bool:
        return len(self.models) == len(self.order)

    @property
    def all_converged(self) -> bool:
        """
        Run level convergence flag, True when every agent fit converged
        """
        return all(model.converged for model in self.models.values())

    def unconverged_agents(self) -> List[int]:
        return [agent for agent in self.order
                if agent in self.models and not self.models[agent].converged]

    def loss_sequence(self, agents: Optional[Iterable[int]] = None
                      ) -> List[float]:
        """
        Losses of `agents` (default: all agents in protocol order)
        """
        if agents is None:
            agents = self.order
        return [self.losses[agent] for agent in agents]

    def logit_matrix(self, agents: Optional[Iterable[int]] = None
                     ) -> np.ndarray:
        """
        n x |agents| matrix of logit columns, protocol order by default
        """
        if agents is None:
            agents = self.order
        agents = list(agents)
        if not agents:
            return np.zeros((self.sample_count, 0))
        return np.column_stack([self.logits_of(agent) for agent in agents])
