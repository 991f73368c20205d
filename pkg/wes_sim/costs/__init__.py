"""Throughput-per-year, cost basis and effectiveness arithmetic."""

from .model import (
    CostReport,
    acquisition_basis,
    cost_report,
    effectiveness,
    format_cost_csv,
    low_utilization_effectiveness,
    rental_cost_report,
    throughput_per_year,
    write_cost_csv,
)

__all__ = [
    "CostReport",
    "acquisition_basis",
    "cost_report",
    "effectiveness",
    "format_cost_csv",
    "low_utilization_effectiveness",
    "rental_cost_report",
    "throughput_per_year",
    "write_cost_csv",
]
