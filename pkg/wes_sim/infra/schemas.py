"""
Infrastructure model: nodes, clusters, file-system regimes and file placement.
"""

from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from wes_sim.errors import CostModelError


class FsRegime(str, Enum):
    """How task inputs and outputs reach the executing node."""
    LOCAL_ONLY = "local_only"
    SHARED_POSIX = "shared_posix"
    STAGED_DFS = "staged_dfs"


class NodeSpec(BaseModel):
    """One compute node."""
    model_config = ConfigDict(frozen=True)

    id: str
    threads: int = Field(ge=1, description="Hardware thread count")
    mem_gb: float = Field(gt=0, description="Main memory in GB")
    class_label: str = ""
    speed: float = Field(default=1.0, gt=0, description="Per-thread speed relative to the reference")


class ClusterSpec(BaseModel):
    """Node inventory, network and file-system regime, plus its cost basis."""
    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    nodes: List[NodeSpec] = Field(min_length=1)
    network_gbit: float = Field(default=0.0, ge=0, description="Link bandwidth per node")
    fs_regime: FsRegime = FsRegime.STAGED_DFS
    acquisition_cost_eur: Optional[float] = Field(default=None, gt=0)
    per_run_rental_eur: Optional[float] = Field(default=None, gt=0)
    task_launch_overhead_s: float = Field(default=0.0, ge=0, description="Setup cost per invocation")
    local_copy_s_per_gb: float = Field(default=0.0, ge=0, description="Working-directory copy latency")

    @model_validator(mode="after")
    def _check_nodes(self) -> "ClusterSpec":
        ids = [node.id for node in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique")
        if self.fs_regime == FsRegime.LOCAL_ONLY and len(self.nodes) != 1:
            raise ValueError("local_only clusters have exactly one node")
        return self

    @property
    def total_threads(self) -> int:
        return sum(node.threads for node in self.nodes)

    @property
    def node_ids(self) -> List[str]:
        return sorted(node.id for node in self.nodes)

    def node(self, node_id: str) -> NodeSpec:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def sorted_nodes(self) -> List[NodeSpec]:
        return sorted(self.nodes, key=lambda node: node.id)

    def cost_basis_kind(self) -> str:
        """``"acquisition"`` or ``"rental"``; exactly one cost field must be set."""
        has_acquisition = self.acquisition_cost_eur is not None
        has_rental = self.per_run_rental_eur is not None
        if has_acquisition == has_rental:
            raise CostModelError(
                f"cluster {self.name!r} needs exactly one of acquisition_cost_eur / per_run_rental_eur"
            )
        return "acquisition" if has_acquisition else "rental"

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ClusterSpec":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


class FsState:
    """
    Replica placement of artifacts, owned by a single simulation run.

    Under local_only every placement is the single node; under shared_posix
    placement is tracked but never consulted for locality.
    """

    def __init__(self, placement: Optional[Dict[str, Iterable[str]]] = None):
        self.placement: Dict[str, Set[str]] = {
            file_id: set(nodes) for file_id, nodes in (placement or {}).items()
        }

    def replicas(self, file_id: str) -> Set[str]:
        return self.placement.get(file_id, set())

    def holds(self, file_id: str, node_id: str) -> bool:
        return node_id in self.placement.get(file_id, ())

    def add_replica(self, file_id: str, node_id: str) -> None:
        self.placement.setdefault(file_id, set()).add(node_id)

    def __contains__(self, file_id: str) -> bool:
        return bool(self.placement.get(file_id))

    def __repr__(self) -> str:
        return f"FsState(files={len(self.placement)})"
