"""Event-driven simulator, reference interpreter, invocation cache and traces."""

from .invocation_cache import CacheEntry, InvocationCache
from .model import (
    ForbidOversubscription,
    PenalizeOversubscription,
    SimOptions,
    compute_duration_s,
    default_sim_options,
    task_duration_s,
)
from .simulator import simulate
from .stepper import step_simulate
from .trace import RunReport, SimTrace, TemplateStats, TraceEntry, build_report, export_trace, write_trace

__all__ = [
    "CacheEntry",
    "ForbidOversubscription",
    "InvocationCache",
    "PenalizeOversubscription",
    "RunReport",
    "SimOptions",
    "SimTrace",
    "TemplateStats",
    "TraceEntry",
    "build_report",
    "compute_duration_s",
    "default_sim_options",
    "export_trace",
    "simulate",
    "step_simulate",
    "task_duration_s",
    "write_trace",
]
