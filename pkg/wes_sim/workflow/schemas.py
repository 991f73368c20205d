"""
Workflow data model: task templates, file artifacts, task instances and the DAG.

Templates and other configuration-sized objects are pydantic models. Artifacts
and task instances are slotted dataclasses because generated workflows hold
hundreds of thousands of them.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Annotated, Any, Dict, Iterable, List, Literal, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field


class TaskStage(str, Enum):
    """Workflow phase a template belongs to."""
    ALIGNMENT = "alignment"
    SPLIT = "split"
    CALLING = "calling"
    POST = "post"


class FixedThreads(BaseModel):
    """Tool runs with exactly ``n`` threads."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed"] = "fixed"
    n: int = Field(default=1, ge=1)


class ConfigurableThreads(BaseModel):
    """Tool accepts a thread-count parameter up to ``max_n``."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["configurable"] = "configurable"
    max_n: int = Field(ge=1)


ThreadModel = Annotated[Union[FixedThreads, ConfigurableThreads], Field(discriminator="kind")]


class FixedMemory(BaseModel):
    """Constant resident memory in GB."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed"] = "fixed"
    m: float = Field(ge=0)


class BasePlusPerInputMemory(BaseModel):
    """Resident memory growing with the task's input volume: b + c * input_gb."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["base_plus_per_input"] = "base_plus_per_input"
    b: float = Field(ge=0)
    c: float = Field(ge=0)


MemoryModel = Annotated[Union[FixedMemory, BasePlusPerInputMemory], Field(discriminator="kind")]


class WorkModel(BaseModel):
    """Amdahl-style work constants: serial seconds plus parallel seconds per input GB."""
    model_config = ConfigDict(frozen=True)

    serial_s: float = Field(ge=0)
    parallel_s_per_gb: float = Field(ge=0)


class OutputSizeModel(BaseModel):
    """Affine output volume: a + r * input_gb."""
    model_config = ConfigDict(frozen=True)

    a: float = Field(default=0.0, ge=0)
    r: float = Field(default=0.0, ge=0)

    def output_gb(self, input_gb: float) -> float:
        return self.a + self.r * input_gb


class TaskTemplate(BaseModel):
    """A tool archetype together with its resource and runtime model."""
    model_config = ConfigDict(frozen=True)

    name: str
    stage: TaskStage = TaskStage.POST
    thread_model: ThreadModel = Field(default_factory=FixedThreads)
    memory_gb: MemoryModel = Field(default_factory=lambda: FixedMemory(m=0.0))
    work_model: WorkModel = Field(default_factory=lambda: WorkModel(serial_s=0.0, parallel_s_per_gb=0.0))
    deterministic: bool = True
    output_size_model: OutputSizeModel = Field(default_factory=OutputSizeModel)

    @property
    def configurable(self) -> bool:
        return isinstance(self.thread_model, ConfigurableThreads)

    @property
    def max_threads(self) -> int:
        if isinstance(self.thread_model, ConfigurableThreads):
            return self.thread_model.max_n
        return self.thread_model.n

    @property
    def min_threads(self) -> int:
        """Smallest allotment the tool can run with."""
        if isinstance(self.thread_model, ConfigurableThreads):
            return 1
        return self.thread_model.n

    def memory_for(self, input_gb: float) -> float:
        """Resident memory (GB) required for an invocation reading ``input_gb``."""
        if isinstance(self.memory_gb, BasePlusPerInputMemory):
            return self.memory_gb.b + self.memory_gb.c * input_gb
        return self.memory_gb.m

    def output_gb(self, input_gb: float) -> float:
        return self.output_size_model.output_gb(input_gb)


@dataclass(frozen=True, slots=True)
class FileArtifact:
    """A file exchanged between tasks; ``producer`` is None for workflow inputs."""
    id: str
    size_gb: float
    producer: Optional[str] = None

    def __post_init__(self):
        if self.size_gb < 0:
            raise ValueError(f"artifact {self.id!r} has negative size {self.size_gb}")


ParamValue = Union[int, float, str]


@dataclass(frozen=True, slots=True)
class TaskInstance:
    """A concrete invocation of a template on named input artifacts."""
    id: str
    template: str
    inputs: Tuple[str, ...] = ()
    params: Tuple[Tuple[str, ParamValue], ...] = ()
    outputs: Tuple[str, ...] = ()

    def param(self, key: str, default: Any = None) -> Any:
        for name, value in self.params:
            if name == key:
                return value
        return default


class DagDocument(BaseModel):
    """JSON layout of a workflow: top-level ``templates``, ``files`` and ``tasks``."""
    templates: List[TaskTemplate] = Field(default_factory=list)
    files: List[FileArtifact] = Field(default_factory=list)
    tasks: List[TaskInstance] = Field(default_factory=list)


class WorkflowDag:
    """
    Tasks plus file artifacts; dependencies are implied by producer/consumer links.

    The DAG is never mutated after construction. Lookups by id keep the last
    occurrence, duplicates are reported by ``validate``.
    """

    def __init__(
        self,
        templates: Union[Mapping[str, TaskTemplate], Iterable[TaskTemplate]] = (),
        tasks: Iterable[TaskInstance] = (),
        files: Iterable[FileArtifact] = (),
    ):
        if isinstance(templates, Mapping):
            self.templates: Dict[str, TaskTemplate] = dict(templates)
        else:
            self.templates = {template.name: template for template in templates}
        self.tasks: Tuple[TaskInstance, ...] = tuple(tasks)
        self.files: Tuple[FileArtifact, ...] = tuple(files)
        self._tasks_by_id = {task.id: task for task in self.tasks}
        self._files_by_id = {artifact.id: artifact for artifact in self.files}

    def __len__(self) -> int:
        return len(self.tasks)

    def task(self, task_id: str) -> TaskInstance:
        return self._tasks_by_id[task_id]

    def file(self, file_id: str) -> FileArtifact:
        return self._files_by_id[file_id]

    def has_file(self, file_id: str) -> bool:
        return file_id in self._files_by_id

    def has_task(self, task_id: str) -> bool:
        return task_id in self._tasks_by_id

    def template_of(self, task: TaskInstance) -> TaskTemplate:
        return self.templates[task.template]

    def input_gb(self, task: TaskInstance) -> float:
        return sum(self._files_by_id[file_id].size_gb for file_id in task.inputs)

    @cached_property
    def output_owner(self) -> Dict[str, str]:
        """Artifact id -> id of the task listing it as an output (first lister wins)."""
        owner: Dict[str, str] = {}
        for task in self.tasks:
            for file_id in task.outputs:
                owner.setdefault(file_id, task.id)
        return owner

    def predecessors(self, task: TaskInstance) -> List[str]:
        """Ids of producer tasks this task depends on, in input order without repeats."""
        seen = []
        for file_id in task.inputs:
            producer = self.output_owner.get(file_id)
            if producer is not None and producer not in seen:
                seen.append(producer)
        return seen

    def workflow_inputs(self) -> List[FileArtifact]:
        return [artifact for artifact in self.files if artifact.producer is None]

    def summary(self) -> Dict[str, int]:
        """Number of task instances per template name."""
        counts: Dict[str, int] = {}
        for task in self.tasks:
            counts[task.template] = counts.get(task.template, 0) + 1
        return dict(sorted(counts.items()))

    # --- Serialization ---

    def to_document(self) -> DagDocument:
        return DagDocument(
            templates=list(self.templates.values()),
            files=list(self.files),
            tasks=list(self.tasks),
        )

    @classmethod
    def from_document(cls, document: DagDocument) -> "WorkflowDag":
        return cls(templates=document.templates, tasks=document.tasks, files=document.files)

    def to_json(self) -> str:
        return self.to_document().model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> "WorkflowDag":
        return cls.from_document(DagDocument.model_validate_json(text))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "WorkflowDag":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WorkflowDag):
            return NotImplemented
        return (
            self.templates == other.templates
            and self.tasks == other.tasks
            and self.files == other.files
        )

    def __repr__(self) -> str:
        return f"WorkflowDag(tasks={len(self.tasks)}, files={len(self.files)}, templates={len(self.templates)})"

