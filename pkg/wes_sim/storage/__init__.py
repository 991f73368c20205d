"""
Run output storage: DAG, report, trace, sweep and cost files of one run.
"""

from .run_store import RunStore, SweepRow, format_sweep_csv

__all__ = ["RunStore", "SweepRow", "format_sweep_csv"]
