"""
Staging arithmetic: transfer times, stage-in/stage-out plans, locality and
initial placement of workflow inputs.
"""

import logging
from typing import Dict, List, NamedTuple, Tuple

from wes_sim.errors import InfrastructureError
from wes_sim.workflow.schemas import TaskInstance, WorkflowDag
from .schemas import ClusterSpec, FsRegime, FsState, NodeSpec

logger = logging.getLogger(__name__)


class Transfer(NamedTuple):
    file_id: str
    size_gb: float


class StagePlan(NamedTuple):
    """Bytes a task moves before (fetch) and after (publish) its compute phase."""
    fetch: List[Transfer]
    publish: List[Transfer]

    @property
    def fetch_gb(self) -> float:
        return sum(transfer.size_gb for transfer in self.fetch)

    @property
    def publish_gb(self) -> float:
        return sum(transfer.size_gb for transfer in self.publish)


def transfer_time_s(size_gb: float, bandwidth_gbit: float, concurrent_share: int = 1) -> float:
    """
    Seconds to move ``size_gb`` over a link fairly shared by ``concurrent_share`` transfers.

    Raises:
        InfrastructureError: If bytes must move over a zero-bandwidth link
    """
    if concurrent_share < 1:
        raise InfrastructureError(f"concurrent share must be >= 1, got {concurrent_share}")
    if size_gb <= 0:
        return 0.0
    if bandwidth_gbit <= 0:
        raise InfrastructureError(f"cannot transfer {size_gb:.3f} GB over a zero-bandwidth link")
    return size_gb * 8.0 * concurrent_share / bandwidth_gbit


def _distinct_inputs(task: TaskInstance) -> List[str]:
    seen: List[str] = []
    for file_id in task.inputs:
        if file_id not in seen:
            seen.append(file_id)
    return seen


def stage_plan(task: TaskInstance, node: NodeSpec, fs: FsState, regime: FsRegime,
               dag: WorkflowDag) -> StagePlan:
    """
    Transfers needed to run ``task`` on ``node``.

    Args:
        task: Task to place
        node: Candidate node
        fs: Current replica placement
        regime: File-system regime of the cluster
        dag: Workflow supplying artifact sizes

    Returns:
        staged_dfs: non-resident input bytes plus every output;
        shared_posix: every input and output byte;
        local_only: nothing

    Raises:
        InfrastructureError: If an input has no replica anywhere
    """
    if regime == FsRegime.LOCAL_ONLY:
        return StagePlan([], [])

    fetch = []
    for file_id in _distinct_inputs(task):
        if file_id not in fs:
            raise InfrastructureError(f"input {file_id!r} of task {task.id!r} has no replica")
        size_gb = dag.file(file_id).size_gb
        if size_gb <= 0:
            continue
        if regime == FsRegime.SHARED_POSIX or not fs.holds(file_id, node.id):
            fetch.append(Transfer(file_id, size_gb))
    publish = [Transfer(file_id, dag.file(file_id).size_gb) for file_id in task.outputs]
    return StagePlan(fetch, publish)


def resident_gb(task: TaskInstance, fs: FsState, dag: WorkflowDag) -> Tuple[float, Dict[str, float]]:
    """Distinct input bytes of ``task`` and, per node holding any of them, the resident part."""
    total = 0.0
    resident: Dict[str, float] = {}
    for file_id in _distinct_inputs(task):
        size_gb = dag.file(file_id).size_gb
        total += size_gb
        for node_id in fs.replicas(file_id):
            resident[node_id] = resident.get(node_id, 0.0) + size_gb
    return total, resident


def locality_score(task: TaskInstance, node: NodeSpec, fs: FsState, dag: WorkflowDag) -> float:
    """Fraction of the task's input bytes already resident on ``node`` (1 without inputs)."""
    total, resident = resident_gb(task, fs, dag)
    if total <= 0:
        return 1.0
    return resident.get(node.id, 0.0) / total


def initial_placement(dag: WorkflowDag, cluster: ClusterSpec) -> FsState:
    """Workflow inputs round-robin over nodes in id order (sorted artifact ids)."""
    fs = FsState()
    node_ids = cluster.node_ids
    inputs = sorted(artifact.id for artifact in dag.workflow_inputs())
    for index, file_id in enumerate(inputs):
        fs.add_replica(file_id, node_ids[index % len(node_ids)])
    logger.debug(f"Placed {len(inputs)} workflow inputs over {len(node_ids)} nodes")
    return fs
