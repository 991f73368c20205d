"""
Workflow model: templates, artifacts, task instances, DAG validation and signatures.

The WES generator lives in ``wes_sim.workflow.generator``; it depends on the
calibration profiles, which in turn depend on this package's schemas.
"""

from .dag import (
    Violation,
    ViolationKind,
    critical_path_hours,
    ensure_valid,
    signature,
    task_graph,
    topological_order,
    validate,
)
from .schemas import (
    BasePlusPerInputMemory,
    ConfigurableThreads,
    DagDocument,
    FileArtifact,
    FixedMemory,
    FixedThreads,
    OutputSizeModel,
    TaskInstance,
    TaskStage,
    TaskTemplate,
    WorkflowDag,
    WorkModel,
)

__all__ = [
    "BasePlusPerInputMemory",
    "ConfigurableThreads",
    "DagDocument",
    "FileArtifact",
    "FixedMemory",
    "FixedThreads",
    "OutputSizeModel",
    "TaskInstance",
    "TaskStage",
    "TaskTemplate",
    "Violation",
    "ViolationKind",
    "WorkModel",
    "WorkflowDag",
    "critical_path_hours",
    "ensure_valid",
    "signature",
    "task_graph",
    "topological_order",
    "validate",
]
