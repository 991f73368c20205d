"""
Throughput, cost and effectiveness arithmetic for the compared infrastructures.

Effectiveness is theoretical workflow runs per year divided by the cost basis
in Euros: the acquisition cost for owned hardware, or runs times the per-run
price for rented nodes.
"""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Iterable, Optional, Union

from pydantic import BaseModel, Field

from wes_sim.config import settings
from wes_sim.engine.trace import RunReport
from wes_sim.errors import CostModelError

logger = logging.getLogger(__name__)

COST_HEADER = ("system", "makespan_h", "throughput", "cost_eur", "effectiveness")


class CostReport(BaseModel):
    """One row of the cost comparison."""
    system: str
    makespan_h: float
    throughput_per_year: int = Field(description="Back-to-back runs per year")
    cost_basis_eur: float
    effectiveness: float = Field(description="Runs per Euro")
    utilization_runs: Optional[int] = Field(default=None, description="Runs actually performed per year")

    @property
    def runs(self) -> int:
        """Runs the effectiveness is based on."""
        return self.utilization_runs if self.utilization_runs is not None else self.throughput_per_year


def throughput_per_year(makespan_h: float, hours_per_year: Optional[float] = None) -> int:
    """
    Runs per year when the workflow runs back to back.

    Args:
        makespan_h: Runtime of one run in hours
        hours_per_year: Defaults to WES_SIM_HOURS_PER_YEAR (8760)

    Returns:
        hours_per_year / makespan_h rounded to the nearest integer (halves up)
    """
    if makespan_h <= 0:
        raise CostModelError(f"makespan must be positive, got {makespan_h}")
    year = hours_per_year if hours_per_year is not None else settings.HOURS_PER_YEAR
    return int(math.floor(year / makespan_h + 0.5))


def effectiveness(runs: float, cost_eur: float) -> float:
    """Runs per Euro, at full precision."""
    if cost_eur <= 0:
        raise CostModelError(f"cost must be positive, got {cost_eur}")
    return runs / cost_eur


def low_utilization_effectiveness(runs_per_year: float, cost_basis_eur: float) -> float:
    """Effectiveness when only ``runs_per_year`` runs are actually performed."""
    return effectiveness(runs_per_year, cost_basis_eur)


def rental_cost_report(makespan_h: float, per_run_eur: float, system: str = "EC2") -> CostReport:
    """
    Cost of rented nodes used back to back for a year.

    The annual cost grows with the number of runs, so the effectiveness is
    always 1 / per_run_eur.
    """
    if makespan_h <= 0 or per_run_eur <= 0:
        raise CostModelError("rental cost needs a positive makespan and per-run price")
    runs = throughput_per_year(makespan_h)
    annual = runs * per_run_eur
    return CostReport(
        system=system,
        makespan_h=makespan_h,
        throughput_per_year=runs,
        cost_basis_eur=annual,
        effectiveness=effectiveness(runs, annual),
    )


def acquisition_basis(report: RunReport) -> float:
    """Acquisition cost, halved when the run was capped to at most half the nodes."""
    if report.acquisition_cost_eur is None:
        raise CostModelError(f"report for {report.system!r} has no acquisition cost")
    cap = report.alignment_node_cap
    if cap is not None and report.node_count and 2 * cap <= report.node_count:
        return report.acquisition_cost_eur * 0.5
    return report.acquisition_cost_eur


def cost_report(report: RunReport, runs_per_year: Optional[int] = None) -> CostReport:
    """
    Cost row for a simulated run.

    Args:
        report: RunReport carrying its cluster's cost context
        runs_per_year: If set, effectiveness uses this many runs instead of the
            theoretical throughput (the low-utilization variant)

    Returns:
        CostReport for the report's system

    Raises:
        CostModelError: If the report has no usable cost basis or makespan
    """
    has_acquisition = report.acquisition_cost_eur is not None
    has_rental = report.per_run_rental_eur is not None
    if has_acquisition == has_rental:
        raise CostModelError(
            f"report for {report.system!r} needs exactly one of acquisition cost / per-run rental"
        )
    if runs_per_year is not None and runs_per_year <= 0:
        raise CostModelError(f"runs per year must be positive, got {runs_per_year}")

    if has_rental:
        row = rental_cost_report(report.makespan_h, report.per_run_rental_eur, report.system)
        if runs_per_year is None:
            return row
        basis = runs_per_year * report.per_run_rental_eur
        return row.model_copy(update={
            "cost_basis_eur": basis,
            "effectiveness": low_utilization_effectiveness(runs_per_year, basis),
            "utilization_runs": runs_per_year,
        })

    basis = acquisition_basis(report)
    throughput = throughput_per_year(report.makespan_h)
    runs = runs_per_year if runs_per_year is not None else throughput
    return CostReport(
        system=report.system,
        makespan_h=report.makespan_h,
        throughput_per_year=throughput,
        cost_basis_eur=basis,
        effectiveness=effectiveness(runs, basis),
        utilization_runs=runs_per_year,
    )


def format_cost_csv(rows: Iterable[CostReport]) -> str:
    """
    Cost comparison CSV; effectiveness is written at full precision.

    The throughput column is always the back-to-back runs per year, also for
    rows whose effectiveness counts fewer performed runs.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(COST_HEADER)
    for row in rows:
        writer.writerow([
            row.system,
            f"{row.makespan_h:.4f}",
            row.throughput_per_year,
            f"{row.cost_basis_eur:.2f}",
            repr(row.effectiveness),
        ])
    return buffer.getvalue()


def write_cost_csv(rows: Iterable[CostReport], path: Union[str, Path]) -> None:
    rows = list(rows)
    Path(path).write_text(format_cost_csv(rows), encoding="utf-8")
    logger.info(f"Wrote {len(rows)} cost row(s) to {path}")
