"""
Simulation traces, aggregate run reports and CSV trace export.
"""

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from pydantic import BaseModel, Field

TRACE_HEADER = ("task_id", "template", "node", "start_s", "end_s", "threads", "cache_hit")


@dataclass(frozen=True, slots=True)
class TraceEntry:
    """One task invocation: where it ran and when it held resources."""
    task_id: str
    template: str
    node: str
    start_s: float
    end_s: float
    threads: int
    staged_in_gb: float = 0.0
    staged_out_gb: float = 0.0
    cache_hit: bool = False

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


class SimTrace:
    """Per-invocation records of one run."""

    def __init__(self, entries: Iterable[TraceEntry] = ()):
        self.entries: List[TraceEntry] = list(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def sorted_entries(self) -> List[TraceEntry]:
        return sorted(self.entries, key=lambda entry: (entry.start_s, entry.task_id))

    def by_task(self) -> Dict[str, TraceEntry]:
        return {entry.task_id: entry for entry in self.entries}

    @property
    def makespan_s(self) -> float:
        return max((entry.end_s for entry in self.entries), default=0.0)


def _seconds(value: float) -> str:
    return f"{value:.6f}"


def export_trace(trace: SimTrace, format: str = "csv") -> bytes:
    """
    Serialize a trace; rows sorted by start time, then task id, LF line endings.

    Args:
        trace: Trace to export
        format: Only ``"csv"`` is supported

    Returns:
        UTF-8 encoded document
    """
    if format != "csv":
        raise ValueError(f"unsupported trace format {format!r}")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for entry in trace.sorted_entries():
        writer.writerow([
            entry.task_id,
            entry.template,
            entry.node,
            _seconds(entry.start_s),
            _seconds(entry.end_s),
            entry.threads,
            "true" if entry.cache_hit else "false",
        ])
    return buffer.getvalue().encode("utf-8")


def write_trace(trace: SimTrace, path: Union[str, Path]) -> None:
    Path(path).write_bytes(export_trace(trace))


class TemplateStats(BaseModel):
    """Totals over all invocations of one template."""
    count: int = 0
    cache_hits: int = 0
    cpu_hours: float = 0.0
    staged_in_gb: float = 0.0
    staged_out_gb: float = 0.0


class RunReport(BaseModel):
    """Aggregate view of a trace plus the cost context of the cluster it ran on."""
    makespan_h: float = Field(description="Latest end over all entries, in hours")
    task_count: int = 0
    executed_count: int = 0
    cache_hits: int = 0
    network_gb: float = 0.0
    per_template: Dict[str, TemplateStats] = Field(default_factory=dict)
    node_utilization: Dict[str, float] = Field(default_factory=dict)
    # Cost context
    system: str = "custom"
    node_count: int = 0
    acquisition_cost_eur: Optional[float] = None
    per_run_rental_eur: Optional[float] = None
    alignment_node_cap: Optional[int] = None
    policy: str = ""
    cache_enabled: bool = False

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunReport":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def build_report(trace: SimTrace, node_threads: Dict[str, int], **context) -> RunReport:
    """
    Aggregate a trace.

    Args:
        trace: Completed run
        node_threads: Thread capacity per node id (all nodes, busy or not)
        **context: Cost-context fields copied onto the report

    Returns:
        RunReport whose makespan equals the latest entry end
    """
    makespan_s = trace.makespan_s
    per_template: Dict[str, TemplateStats] = {}
    busy: Dict[str, float] = {node_id: 0.0 for node_id in node_threads}
    hits = 0
    network_gb = 0.0
    for entry in trace.entries:
        stats = per_template.setdefault(entry.template, TemplateStats())
        stats.count += 1
        if entry.cache_hit:
            stats.cache_hits += 1
            hits += 1
            continue
        thread_seconds = entry.threads * entry.duration_s
        stats.cpu_hours += thread_seconds / 3600.0
        stats.staged_in_gb += entry.staged_in_gb
        stats.staged_out_gb += entry.staged_out_gb
        network_gb += entry.staged_in_gb + entry.staged_out_gb
        busy[entry.node] = busy.get(entry.node, 0.0) + thread_seconds

    utilization = {
        node_id: (busy.get(node_id, 0.0) / (threads * makespan_s) if makespan_s > 0 else 0.0)
        for node_id, threads in sorted(node_threads.items())
    }
    return RunReport(
        makespan_h=makespan_s / 3600.0,
        task_count=len(trace),
        executed_count=len(trace) - hits,
        cache_hits=hits,
        network_gb=network_gb,
        per_template=dict(sorted(per_template.items())),
        node_utilization=utilization,
        **context,
    )
