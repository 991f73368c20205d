"""
Structural analysis of workflow DAGs: validation, topological order,
critical path and invocation signatures.
"""

import hashlib
import json
import logging
from collections import Counter
from enum import Enum
from typing import Callable, Dict, List

import networkx as nx
from pydantic import BaseModel, ConfigDict

from wes_sim.errors import WorkflowValidationError
from .schemas import TaskInstance, WorkflowDag

logger = logging.getLogger(__name__)


class ViolationKind(str, Enum):
    """Kinds of invariant violations reported by ``validate``."""
    CYCLE = "cycle"
    DANGLING_REFERENCE = "dangling_reference"
    DUPLICATE_ID = "duplicate_id"
    PRODUCER_MISMATCH = "producer_mismatch"
    MULTIPLE_PRODUCERS = "multiple_producers"
    UNKNOWN_TEMPLATE = "unknown_template"


class Violation(BaseModel):
    """One violated DAG invariant."""
    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    subject: str
    detail: str = ""


def task_graph(dag: WorkflowDag) -> nx.DiGraph:
    """Task-level dependency graph: an edge P -> T when T reads an output of P."""
    graph = nx.DiGraph()
    graph.add_nodes_from(task.id for task in dag.tasks)
    owner = dag.output_owner
    for task in dag.tasks:
        for file_id in task.inputs:
            producer = owner.get(file_id)
            if producer is not None:
                graph.add_edge(producer, task.id)
    return graph


def validate(dag: WorkflowDag) -> List[Violation]:
    """
    Check every DAG invariant.

    Args:
        dag: Workflow to check

    Returns:
        All violations found; an empty list means the DAG is executable
    """
    violations: List[Violation] = []

    for task_id, count in Counter(task.id for task in dag.tasks).items():
        if count > 1:
            violations.append(Violation(kind=ViolationKind.DUPLICATE_ID, subject=task_id,
                                        detail=f"task id used {count} times"))
    for file_id, count in Counter(artifact.id for artifact in dag.files).items():
        if count > 1:
            violations.append(Violation(kind=ViolationKind.DUPLICATE_ID, subject=file_id,
                                        detail=f"artifact id used {count} times"))

    listed_by: Dict[str, List[str]] = {}
    for task in dag.tasks:
        if task.template not in dag.templates:
            violations.append(Violation(kind=ViolationKind.UNKNOWN_TEMPLATE, subject=task.id,
                                        detail=f"template {task.template!r} is not defined"))
        for file_id in task.inputs:
            if not dag.has_file(file_id):
                violations.append(Violation(kind=ViolationKind.DANGLING_REFERENCE, subject=task.id,
                                            detail=f"input {file_id!r} does not exist"))
        for file_id in task.outputs:
            listed_by.setdefault(file_id, []).append(task.id)
            if not dag.has_file(file_id):
                violations.append(Violation(kind=ViolationKind.DANGLING_REFERENCE, subject=task.id,
                                            detail=f"output {file_id!r} does not exist"))
            elif dag.file(file_id).producer != task.id:
                violations.append(Violation(kind=ViolationKind.PRODUCER_MISMATCH, subject=file_id,
                                            detail=f"listed as output of {task.id!r} but producer is "
                                                   f"{dag.file(file_id).producer!r}"))

    for file_id, producers in listed_by.items():
        if len(producers) > 1:
            violations.append(Violation(kind=ViolationKind.MULTIPLE_PRODUCERS, subject=file_id,
                                        detail=f"produced by {sorted(producers)}"))

    for artifact in dag.files:
        if artifact.producer is None:
            continue
        if not dag.has_task(artifact.producer):
            violations.append(Violation(kind=ViolationKind.DANGLING_REFERENCE, subject=artifact.id,
                                        detail=f"producer {artifact.producer!r} does not exist"))
        elif artifact.id not in listed_by:
            violations.append(Violation(kind=ViolationKind.PRODUCER_MISMATCH, subject=artifact.id,
                                        detail=f"producer {artifact.producer!r} does not list it as output"))

    graph = task_graph(dag)
    for task_id in sorted(node for node, _ in nx.selfloop_edges(graph)):
        violations.append(Violation(kind=ViolationKind.CYCLE, subject=task_id,
                                    detail="task consumes its own output"))
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            members = sorted(component)
            violations.append(Violation(kind=ViolationKind.CYCLE, subject=members[0],
                                        detail=f"cycle through {len(members)} tasks: {members[:5]}"))

    if violations:
        logger.debug(f"DAG validation found {len(violations)} violation(s)")
    return violations


def ensure_valid(dag: WorkflowDag) -> None:
    """Raise WorkflowValidationError if ``dag`` has any violation."""
    violations = validate(dag)
    if violations:
        raise WorkflowValidationError(
            f"workflow is invalid ({len(violations)} violation(s), first: "
            f"{violations[0].kind.value} on {violations[0].subject!r})",
            violations,
        )


def topological_order(dag: WorkflowDag) -> List[str]:
    """Task ids in a dependency-respecting order (lexicographic among ready tasks)."""
    ensure_valid(dag)
    return list(nx.lexicographical_topological_sort(task_graph(dag)))


def critical_path_hours(dag: WorkflowDag, duration_of: Callable[[TaskInstance], float]) -> float:
    """
    Length of the longest dependency chain.

    Args:
        dag: A valid workflow
        duration_of: Duration of a task instance in hours

    Returns:
        Critical path length in hours (0 for an empty DAG)
    """
    ensure_valid(dag)
    graph = task_graph(dag)
    finish: Dict[str, float] = {}
    for task_id in nx.topological_sort(graph):
        start = max((finish[pred] for pred in graph.predecessors(task_id)), default=0.0)
        finish[task_id] = start + duration_of(dag.task(task_id))
    return max(finish.values(), default=0.0)


def signature(instance: TaskInstance) -> str:
    """
    Deterministic content key of an invocation.

    Covers template name, ordered input artifact ids and ordered params; the
    instance id and outputs are ignored.
    """
    payload = json.dumps(
        [instance.template, list(instance.inputs), [[key, value] for key, value in instance.params]],
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
