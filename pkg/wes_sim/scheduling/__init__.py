"""Scheduling policies: admission, placement strategies and greedy selection."""

from .policy import NodeLoad, Policy, PolicyKind, default_policy
from .select import Assignment, ReadyQueue, Selector, allotment, feasible, per_node_share, select
from .strategies import PlacementStrategy, StrategyRegistry, initialize_registry, strategy_for

__all__ = [
    "Assignment",
    "NodeLoad",
    "PlacementStrategy",
    "Policy",
    "PolicyKind",
    "ReadyQueue",
    "Selector",
    "StrategyRegistry",
    "allotment",
    "default_policy",
    "feasible",
    "initialize_registry",
    "per_node_share",
    "select",
    "strategy_for",
]
