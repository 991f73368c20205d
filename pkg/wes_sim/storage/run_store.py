import csv
import io
import logging
import shutil
from pathlib import Path
from typing import Iterable, List, NamedTuple, Sequence

from wes_sim.config import settings as config
from wes_sim.costs.model import CostReport, format_cost_csv
from wes_sim.engine.trace import RunReport, SimTrace, export_trace
from wes_sim.workflow.schemas import WorkflowDag

logger = logging.getLogger(__name__)

SWEEP_HEADER = ("regions", "makespan_h", "tasks", "network_gb")


class SweepRow(NamedTuple):
    """One simulated region count."""
    regions: int
    makespan_h: float
    tasks: int
    network_gb: float


def format_sweep_csv(rows: Iterable[SweepRow]) -> str:
    """Sweep CSV with rows sorted by region count (stable for repeated counts)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in sorted(rows, key=lambda row: row.regions):
        writer.writerow([row.regions, f"{row.makespan_h:.4f}", row.tasks, f"{row.network_gb:.3f}"])
    return buffer.getvalue()


class RunStore:
    """Output directory of one CLI run."""
    __store_path: Path

    DAG_FILE = "dag.json"
    REPORT_FILE = "report.json"
    TRACE_FILE = "trace.csv"
    SWEEP_FILE = "sweep.csv"
    COST_FILE = "cost.csv"

    def __init__(self, store_path=None):
        self.__store_path = Path(store_path or config.OUTPUT_DIR)
        self.__store_path.mkdir(parents=True, exist_ok=True)

    @property
    def path(self) -> Path:
        return self.__store_path

    def _write(self, name: str, text: str) -> Path:
        file_path = self.__store_path / name
        file_path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {file_path}")
        return file_path

    def save_dag(self, dag: WorkflowDag) -> Path:
        return self._write(self.DAG_FILE, dag.to_json())

    def save_run(self, trace: SimTrace, report: RunReport) -> List[Path]:
        """Write ``report.json`` and ``trace.csv``."""
        report_path = self._write(self.REPORT_FILE, report.model_dump_json(indent=2))
        trace_path = self.__store_path / self.TRACE_FILE
        trace_path.write_bytes(export_trace(trace))
        logger.info(f"Wrote {trace_path}")
        return [report_path, trace_path]

    def save_sweep(self, rows: Sequence[SweepRow]) -> Path:
        return self._write(self.SWEEP_FILE, format_sweep_csv(rows))

    def save_costs(self, rows: Sequence[CostReport]) -> Path:
        return self._write(self.COST_FILE, format_cost_csv(rows))

    def load_dag(self) -> WorkflowDag:
        return WorkflowDag.load(self.__store_path / self.DAG_FILE)

    def load_report(self) -> RunReport:
        return RunReport.load(self.__store_path / self.REPORT_FILE)

    def load_trace_text(self) -> str:
        return (self.__store_path / self.TRACE_FILE).read_text(encoding="utf-8")

    def clear_store(self) -> None:
        if self.__store_path.exists():
            shutil.rmtree(self.__store_path)
        self.__store_path.mkdir(parents=True, exist_ok=True)
