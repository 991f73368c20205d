"""
Simulation options and the task-duration law shared by the event engine and
the fixed-timestep interpreter.
"""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from wes_sim.config import settings
from wes_sim.errors import SimulationError
from wes_sim.infra.schemas import ClusterSpec, NodeSpec
from wes_sim.workflow.schemas import TaskTemplate

MEM_EPS = 1e-9


class ForbidOversubscription(BaseModel):
    """Every policy checks thread and memory feasibility."""
    model_config = ConfigDict(frozen=True)

    mode: Literal["forbid"] = "forbid"


class PenalizeOversubscription(BaseModel):
    """Oversubscription is allowed but stretches compute on the affected node."""
    model_config = ConfigDict(frozen=True)

    mode: Literal["penalize"] = "penalize"
    mem_spill_factor: float = Field(default=settings.MEM_SPILL_FACTOR, ge=1.0)
    thread_share: bool = True


Oversubscription = Annotated[
    Union[ForbidOversubscription, PenalizeOversubscription], Field(discriminator="mode")
]


class SimOptions(BaseModel):
    """Run-time switches of one simulation."""
    model_config = ConfigDict(frozen=True)

    cache_enabled: bool = False
    oversubscription: Oversubscription = Field(default_factory=ForbidOversubscription)
    random_seed: int = Field(default=0, description="Reserved; results do not depend on it")

    @property
    def strict(self) -> bool:
        return isinstance(self.oversubscription, ForbidOversubscription)


def default_sim_options(cluster_name: str, cache_enabled: bool = False) -> SimOptions:
    """SA ran without resource checks, so its runs are penalized instead of forbidden."""
    if cluster_name.upper() == "SA":
        return SimOptions(cache_enabled=cache_enabled, oversubscription=PenalizeOversubscription())
    return SimOptions(cache_enabled=cache_enabled)


def task_duration_s(template: TaskTemplate, threads_k: int, input_gb: float) -> float:
    """
    Amdahl-style compute time at reference speed: s + p * input_gb / k.

    Raises:
        SimulationError: If ``threads_k`` is outside the template's thread model
    """
    if threads_k < 1 or threads_k > template.max_threads:
        raise SimulationError(
            f"{template.name} cannot run with {threads_k} threads (max {template.max_threads})"
        )
    work = template.work_model
    return work.serial_s + work.parallel_s_per_gb * input_gb / threads_k


def compute_duration_s(template: TaskTemplate, threads_k: int, input_gb: float, node: NodeSpec,
                       cluster: ClusterSpec, options: SimOptions, node_mem_in_use: float,
                       node_compute_threads: int) -> float:
    """
    Wall-clock compute phase of one task on ``node``.

    Penalties use the node state when the phase starts: memory held beyond
    capacity multiplies by the spill factor, compute threads beyond capacity
    multiply by demand / capacity.
    """
    seconds = (
        task_duration_s(template, threads_k, input_gb) / node.speed
        + cluster.local_copy_s_per_gb * input_gb
        + cluster.task_launch_overhead_s
    )
    if seconds <= 0:
        return 0.0
    penalty = options.oversubscription
    if isinstance(penalty, PenalizeOversubscription):
        if node_mem_in_use > node.mem_gb + MEM_EPS:
            seconds *= penalty.mem_spill_factor
        if penalty.thread_share and node_compute_threads > node.threads:
            seconds *= node_compute_threads / node.threads
    return seconds
