"""
Scheduling policy configuration and per-node load bookkeeping.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from wes_sim.errors import InvalidParamsError
from wes_sim.workflow.schemas import TaskTemplate


class PolicyKind(str, Enum):
    """Placement and admission behaviors of the modeled schedulers."""
    SGE_LOAD_BALANCE = "sge_load_balance"
    HIWAY_LOCALITY = "hiway_locality"
    LOCAL_MAX_CONCURRENCY = "local_max_concurrency"
    LOCAL_MEMORY_AWARE = "local_memory_aware"


class Policy(BaseModel):
    """Scheduler choice plus its parameters."""
    model_config = ConfigDict(frozen=True)

    kind: PolicyKind = PolicyKind.SGE_LOAD_BALANCE
    k: Optional[int] = Field(default=None, ge=1, description="Concurrency limit of local_max_concurrency")
    alignment_node_cap: Optional[int] = Field(default=None, ge=1, description="Alignment tasks use only the first N nodes")
    thread_defaults: Dict[str, int] = Field(default_factory=dict, description="Thread allotment per template")
    memory_overrides: Dict[str, float] = Field(default_factory=dict, description="Memory given to each instance per template")

    @model_validator(mode="after")
    def _check_k(self) -> "Policy":
        if self.kind == PolicyKind.LOCAL_MAX_CONCURRENCY and self.k is None:
            raise ValueError("local_max_concurrency requires k")
        if any(value < 1 for value in self.thread_defaults.values()):
            raise ValueError("thread defaults must be >= 1")
        if any(value < 0 for value in self.memory_overrides.values()):
            raise ValueError("memory overrides must be >= 0")
        return self

    @classmethod
    def parse(cls, text: str, **extra) -> "Policy":
        """Build a policy from ``kind`` or ``kind:k``, e.g. ``local_max_concurrency:30``."""
        kind_text, _, k_text = text.partition(":")
        try:
            kind = PolicyKind(kind_text.strip())
        except ValueError:
            choices = ", ".join(kind.value for kind in PolicyKind)
            raise InvalidParamsError(f"unknown policy {kind_text!r}; expected one of {choices}") from None
        if k_text:
            if not k_text.strip().isdigit():
                raise InvalidParamsError(f"policy parameter must be a positive integer, got {k_text!r}")
            extra["k"] = int(k_text)
        return cls(kind=kind, **extra)

    def memory_of(self, template: TaskTemplate, input_gb: float) -> float:
        override = self.memory_overrides.get(template.name)
        if override is not None:
            return override
        return template.memory_for(input_gb)


@dataclass
class NodeLoad:
    """Resources currently held on one node."""
    node_id: str
    threads_in_use: int = 0
    mem_gb_in_use: float = 0.0
    running: List[str] = field(default_factory=list)

    def assign(self, task_id: str, threads: int, mem_gb: float) -> None:
        self.threads_in_use += threads
        self.mem_gb_in_use += mem_gb
        self.running.append(task_id)

    def release(self, task_id: str, threads: int, mem_gb: float) -> None:
        self.threads_in_use -= threads
        self.mem_gb_in_use -= mem_gb
        self.running.remove(task_id)
        if not self.running:
            # no float drift once a node drains
            self.threads_in_use = 0
            self.mem_gb_in_use = 0.0

    def copy(self) -> "NodeLoad":
        return NodeLoad(self.node_id, self.threads_in_use, self.mem_gb_in_use, list(self.running))


ALIGNMENT_THREAD_TEMPLATES = ("align_pipeline", "bwa_mem")


def default_policy(cluster_name: str) -> Policy:
    """
    Policy each preset ran with.

    SA used Cuneiform's single concurrency limit (30) with three BWA threads,
    YC and EC2 use Hi-WAY's locality-aware scheduler, HPC used SGE on 54 nodes
    with 24 BWA threads.
    """
    name = cluster_name.upper()
    if name == "SA":
        return Policy(kind=PolicyKind.LOCAL_MAX_CONCURRENCY, k=30,
                      thread_defaults={template: 3 for template in ALIGNMENT_THREAD_TEMPLATES})
    if name in ("YC", "EC2"):
        return Policy(kind=PolicyKind.HIWAY_LOCALITY)
    if name == "HPC":
        return Policy(kind=PolicyKind.SGE_LOAD_BALANCE, alignment_node_cap=54,
                      thread_defaults={template: 24 for template in ALIGNMENT_THREAD_TEMPLATES})
    return Policy(kind=PolicyKind.SGE_LOAD_BALANCE)
