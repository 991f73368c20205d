"""Nodes, clusters, file-system regimes, presets and staging arithmetic."""

from .presets import PRESET_NAMES, dump_presets, load_cluster, preset
from .schemas import ClusterSpec, FsRegime, FsState, NodeSpec
from .staging import (
    StagePlan,
    Transfer,
    initial_placement,
    locality_score,
    stage_plan,
    transfer_time_s,
)

__all__ = [
    "PRESET_NAMES",
    "ClusterSpec",
    "FsRegime",
    "FsState",
    "NodeSpec",
    "StagePlan",
    "Transfer",
    "dump_presets",
    "initial_placement",
    "load_cluster",
    "locality_score",
    "preset",
    "stage_plan",
    "transfer_time_s",
]
