"""
Tests for costs/model.py - Throughput, cost basis and effectiveness
"""
import pytest

from wes_sim.costs.model import (
    COST_HEADER,
    cost_report,
    format_cost_csv,
    low_utilization_effectiveness,
    rental_cost_report,
    throughput_per_year,
    write_cost_csv,
)
from wes_sim.engine.trace import RunReport
from wes_sim.errors import CostModelError


def owned(system, makespan_h, cost, node_count=1, cap=None):
    return RunReport(makespan_h=makespan_h, system=system, node_count=node_count,
                     acquisition_cost_eur=cost, alignment_node_cap=cap)


@pytest.fixture
def reports():
    """Reference runs on the three owned systems"""
    return [
        owned("SA", 24.0, 11000.0),
        owned("YC", 7.6, 100000.0, node_count=23),
        owned("HPC", 1.14, 800000.0, node_count=111, cap=54),
    ]


class TestThroughput:
    """Test runs per year"""

    @pytest.mark.parametrize("makespan_h, runs", [(24.0, 365), (7.6, 1153), (1.14, 7684), (8760.0, 1)])
    def test_reference_values(self, makespan_h, runs):
        """Test 8760 h divided by the makespan, rounded"""
        assert throughput_per_year(makespan_h) == runs

    def test_rounds_half_up(self):
        """Test halves round away from zero"""
        assert throughput_per_year(4.0, hours_per_year=10.0) == 3

    def test_zero_makespan(self):
        """Test a zero makespan has no throughput"""
        with pytest.raises(CostModelError):
            throughput_per_year(0.0)


class TestCostReport:
    """Test cost rows of owned systems"""

    def test_effectiveness(self, reports):
        """Test runs per Euro on SA, YC and HPC"""
        rows = [cost_report(report) for report in reports]

        assert rows[0].effectiveness == pytest.approx(365 / 11000)
        assert rows[1].effectiveness == pytest.approx(1153 / 100000)
        assert rows[2].effectiveness == pytest.approx(7684 / 400000)

    def test_half_cluster_halves_cost(self, reports):
        """Test an alignment cap of at most half the nodes halves the basis"""
        assert cost_report(reports[2]).cost_basis_eur == 400000.0
        assert cost_report(owned("X", 1.0, 1000.0, node_count=10, cap=6)).cost_basis_eur == 1000.0

    @pytest.mark.parametrize("index, expected", [(0, 50 / 11000), (1, 50 / 100000), (2, 50 / 400000)])
    def test_low_utilization(self, reports, index, expected):
        """Test 50 runs per year"""
        row = cost_report(reports[index], runs_per_year=50)

        assert row.effectiveness == pytest.approx(expected)
        assert row.runs == 50

    def test_low_utilization_display(self, reports):
        """Test SA at 50 runs per year shows as 0.0045 at four decimals"""
        row = cost_report(reports[0], runs_per_year=50)

        assert f"{row.effectiveness:.4f}" == "0.0045"
        assert row.throughput_per_year == 365

    def test_no_cost_basis(self):
        """Test a report without any cost context"""
        with pytest.raises(CostModelError):
            cost_report(RunReport(makespan_h=1.0, system="custom"))

    def test_both_cost_bases(self):
        """Test acquisition and rental are exclusive"""
        report = RunReport(makespan_h=1.0, acquisition_cost_eur=1.0, per_run_rental_eur=1.0)

        with pytest.raises(CostModelError):
            cost_report(report)

    def test_non_positive_runs(self, reports):
        """Test runs per year must be positive"""
        with pytest.raises(CostModelError):
            cost_report(reports[0], runs_per_year=0)


class TestRental:
    """Test rented infrastructure"""

    def test_ec2_year(self):
        """Test 14 h runs at 500 Euro per run"""
        row = rental_cost_report(14.0, 500.0)

        assert row.throughput_per_year == 626
        assert row.cost_basis_eur == 313000.0
        assert row.effectiveness == pytest.approx(0.002)

    def test_one_run_per_year(self):
        """Test a makespan of a full year"""
        assert rental_cost_report(8760.0, 1.0).throughput_per_year == 1

    def test_one_hour_runs(self):
        """Test cost grows with the number of runs"""
        row = rental_cost_report(1.0, 500.0)

        assert row.throughput_per_year == 8760
        assert row.cost_basis_eur == 4380000.0
        assert row.effectiveness == pytest.approx(0.002)

    def test_rented_low_utilization(self):
        """Test 50 rented runs cost 50 times the per-run price"""
        report = RunReport(makespan_h=14.0, system="EC2", per_run_rental_eur=500.0)

        row = cost_report(report, runs_per_year=50)

        assert row.cost_basis_eur == 25000.0
        assert row.effectiveness == pytest.approx(0.002)
        assert low_utilization_effectiveness(50, 25000.0) == pytest.approx(0.002)


class TestCostCsv:
    """Test the cost comparison CSV"""

    def test_rows(self, reports):
        """Test header, back-to-back throughput and full-precision effectiveness"""
        lines = format_cost_csv([cost_report(report, runs_per_year=50) for report in reports]).splitlines()

        assert lines[0] == ",".join(COST_HEADER)
        assert lines[1].startswith("SA,24.0000,365,11000.00,0.0045")
        assert lines[3] == "HPC,1.1400,7684,400000.00,0.000125"
        assert len(lines) == 4

    def test_write(self, reports, tmp_path):
        """Test writing to disk"""
        path = tmp_path / "cost.csv"
        rows = [cost_report(report) for report in reports]

        write_cost_csv(rows, path)

        assert path.read_text(encoding="utf-8") == format_cost_csv(rows)
