"""
Node-ranking strategies behind each PolicyKind, and the registry resolving them.
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional, Tuple

from wes_sim.errors import InvalidParamsError
from wes_sim.infra.schemas import FsState, NodeSpec
from wes_sim.infra.staging import locality_score, resident_gb
from wes_sim.workflow.schemas import TaskInstance, WorkflowDag
from .policy import NodeLoad, Policy, PolicyKind

logger = logging.getLogger(__name__)

NodeRanker = Callable[[NodeSpec, NodeLoad], Tuple]


def utilization(node: NodeSpec, load: NodeLoad) -> float:
    return load.threads_in_use / node.threads


class PlacementStrategy(ABC):
    """Ranks feasible nodes for a task; the lowest key wins."""

    kind: PolicyKind
    # local_max_concurrency admits by count alone once oversubscription is allowed
    ignores_resources_when_penalized = False

    def headroom(self, running_total: int, policy: Policy) -> Optional[int]:
        """How many more tasks may start given ``running_total`` running ones; None is unbounded."""
        return None

    def admission_open(self, running_total: int, policy: Policy) -> bool:
        """Whether another task may start given ``running_total`` tasks holding resources."""
        headroom = self.headroom(running_total, policy)
        return headroom is None or headroom > 0

    @abstractmethod
    def node_key(self, task: TaskInstance, node: NodeSpec, load: NodeLoad,
                 fs: FsState, dag: WorkflowDag) -> Tuple:
        """Sort key of ``node`` for ``task``; must end with the node id for a total order."""

    def ranker(self, task: TaskInstance, fs: FsState, dag: WorkflowDag) -> NodeRanker:
        """``node_key`` bound to one task, for ranking every candidate node of one placement."""
        return lambda node, load: self.node_key(task, node, load, fs, dag)


class SgeLoadBalance(PlacementStrategy):
    """Uniform load: lowest thread utilization, then node id."""
    kind = PolicyKind.SGE_LOAD_BALANCE

    def node_key(self, task, node, load, fs, dag):
        return (utilization(node, load), node.id)


class HiwayLocality(PlacementStrategy):
    """Prefer nodes already holding the task's input bytes."""
    kind = PolicyKind.HIWAY_LOCALITY

    def node_key(self, task, node, load, fs, dag):
        return (-locality_score(task, node, fs, dag), utilization(node, load), node.id)

    def ranker(self, task, fs, dag):
        # resident bytes are gathered once from the replica sets instead of once per node
        total, resident = resident_gb(task, fs, dag)

        def key(node: NodeSpec, load: NodeLoad) -> Tuple:
            score = resident.get(node.id, 0.0) / total if total > 0 else 1.0
            return (-score, utilization(node, load), node.id)

        return key


class LocalMaxConcurrency(PlacementStrategy):
    """Single concurrency limit regardless of per-template memory."""
    kind = PolicyKind.LOCAL_MAX_CONCURRENCY
    ignores_resources_when_penalized = True

    def headroom(self, running_total, policy):
        return (policy.k or 0) - running_total

    def node_key(self, task, node, load, fs, dag):
        return (utilization(node, load), node.id)


class LocalMemoryAware(PlacementStrategy):
    """Admit while threads and memory fit."""
    kind = PolicyKind.LOCAL_MEMORY_AWARE

    def node_key(self, task, node, load, fs, dag):
        return (utilization(node, load), node.id)


class StrategyRegistry:
    """
    Central registry of placement strategies.

    Strategies are stateless, so one shared instance per kind serves every
    concurrent simulation run.
    """

    _instance = None
    _strategies: Dict[PolicyKind, PlacementStrategy] = {}

    def __new__(cls):
        """Singleton pattern for the global registry."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def register(self, strategy: PlacementStrategy) -> None:
        self._strategies[strategy.kind] = strategy
        logger.debug(f"Registered placement strategy: {strategy.kind.value}")

    def get(self, kind: PolicyKind) -> PlacementStrategy:
        strategy = self._strategies.get(kind)
        if strategy is None:
            raise InvalidParamsError(f"no placement strategy registered for {kind.value!r}")
        return strategy

    def list_available(self) -> List[PolicyKind]:
        return sorted(self._strategies, key=lambda kind: kind.value)

    def clear(self) -> None:
        """Clear all registrations (useful for testing)."""
        self._strategies.clear()


def initialize_registry(registry: Optional[StrategyRegistry] = None) -> StrategyRegistry:
    """Register the built-in strategies; idempotent."""
    registry = registry or StrategyRegistry()
    for strategy in (SgeLoadBalance(), HiwayLocality(), LocalMaxConcurrency(), LocalMemoryAware()):
        registry.register(strategy)
    return registry


def strategy_for(policy: Policy) -> PlacementStrategy:
    registry = StrategyRegistry()
    if policy.kind not in registry.list_available():
        initialize_registry(registry)
    return registry.get(policy.kind)
