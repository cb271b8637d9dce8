"""Interval billing, day totals, and report comparison."""

import pytest

from homedr.billing import (
    BillReport,
    IntervalLoads,
    compare_reports,
    day_bill,
    interval_energy_cost,
)
from homedr.core import INTERVALS_PER_DAY, ValidationError


def full_day(loads_by_interval, price=4.0, pil=3.0):
    return [
        IntervalLoads(k=k, price=price, pil_kw=pil, loads_kw=loads_by_interval.get(k, {}))
        for k in range(1, INTERVALS_PER_DAY + 1)
    ]


class TestIntervalEnergyCost:
    def test_excess_billed_at_twice_price(self):
        bill = interval_energy_cost(1, total_kw=3.5, pil_kw=3.0, price=4.0)
        assert bill.energy_kwh == pytest.approx(3.5 / 12)
        assert bill.in_limit_kwh == pytest.approx(0.25)
        assert bill.excess_kwh == pytest.approx(0.5 / 12)
        assert bill.base_cost == pytest.approx(1.0)
        assert bill.penalty_cost == pytest.approx(2 * 4.0 * 0.5 / 12)
        assert bill.total_cost == pytest.approx(1.0 + 1.0 / 3.0)

    def test_no_violation_is_pure_energy_cost(self):
        bill = interval_energy_cost(1, total_kw=2.0, pil_kw=3.0, price=4.0)
        assert bill.excess_kwh == 0.0
        assert bill.penalty_cost == 0.0
        assert bill.total_cost == pytest.approx(2.0 / 12 * 4.0)

    def test_zero_consumption_costs_nothing(self):
        bill = interval_energy_cost(7, total_kw=0.0, pil_kw=3.0, price=4.0)
        assert bill.total_cost == 0.0
        assert bill.energy_kwh == 0.0

    def test_energy_splits_add_up(self):
        for total in (0.0, 1.0, 2.99, 3.0, 3.01, 7.5):
            bill = interval_energy_cost(1, total_kw=total, pil_kw=3.0, price=4.0)
            assert bill.energy_kwh == pytest.approx(bill.in_limit_kwh + bill.excess_kwh)
            assert bill.excess_kwh >= 0.0 and bill.in_limit_kwh >= 0.0


class TestDayBill:
    def test_closed_form_single_load(self):
        # 0.75 kW for 24 intervals (2 h) at 4.0/kWh, no violation: 0.75*2*4 = 6.0
        loads = {k: {"pump": 0.75} for k in range(1, 25)}
        report = day_bill(full_day(loads))
        assert report.total_cost == pytest.approx(6.0)
        assert report.penalty_total == 0.0
        assert report.peak_kw == 0.75
        assert report.per_load["pump"] == pytest.approx(6.0)

    def test_empty_day(self):
        report = day_bill(full_day({}))
        assert report.total_cost == 0.0
        assert report.peak_kw == 0.0
        assert report.per_load == {}

    def test_rejects_incomplete_day(self):
        rows = full_day({})[:-1]
        with pytest.raises(ValidationError):
            day_bill(rows)

    def test_doubling_prices_doubles_cost(self):
        loads = {k: {"a": 1.0, "b": 2.5} for k in range(50, 80)}
        report1 = day_bill(full_day(loads, price=4.0))
        report2 = day_bill(full_day(loads, price=8.0))
        assert report2.total_cost == pytest.approx(2 * report1.total_cost)
        assert report2.penalty_total == pytest.approx(2 * report1.penalty_total)

    def test_additivity_over_partition(self):
        loads = {k: {"a": 1.2} for k in range(1, 289, 3)}
        rows = full_day(loads)
        whole = day_bill(rows)
        first, second = rows[:100], rows[100:]
        split_total = sum(
            interval_energy_cost(r.k, r.total_kw, r.pil_kw, r.price).total_cost for r in first
        ) + sum(interval_energy_cost(r.k, r.total_kw, r.pil_kw, r.price).total_cost for r in second)
        assert whole.total_cost == pytest.approx(split_total, abs=1e-12)

    def test_high_pil_reduces_to_plain_energy_pricing(self):
        loads = {k: {"a": 1.0, "b": 2.5, "c": 0.4} for k in range(10, 200)}
        report = day_bill(full_day(loads, price=5.0, pil=100.0))
        expected = sum(sum(kw.values()) for kw in loads.values()) / 12 * 5.0
        assert report.penalty_total == 0.0
        assert report.total_cost == pytest.approx(expected)

    def test_penalty_attributed_to_schedulable_loads(self):
        # 2.0 kW fixed draw + 2.0 kW schedulable, PIL 3.0: 1.0 kW excess.
        loads = {1: {"fixed": 2.0, "shiftable": 2.0}}
        report = day_bill(full_day(loads), schedulable=frozenset({"shiftable"}))
        bill = interval_energy_cost(1, 4.0, 3.0, 4.0)
        assert report.penalty_total == pytest.approx(bill.penalty_cost)
        assert report.per_load["shiftable"] == pytest.approx(bill.base_cost / 2 + bill.penalty_cost)
        assert report.per_load["fixed"] == pytest.approx(bill.base_cost / 2)

    def test_penalty_falls_back_to_all_loads_when_no_sl_on(self):
        loads = {1: {"fixed": 4.0}}
        report = day_bill(full_day(loads), schedulable=frozenset({"shiftable"}))
        assert report.per_load["fixed"] == pytest.approx(report.total_cost)

    def test_nonnegativity_and_penalty_iff_excess(self):
        loads = {k: {"a": 2.9} for k in range(1, 289)}
        report = day_bill(full_day(loads, pil=3.0))
        assert report.penalty_total == 0.0
        loads = {k: {"a": 3.1} for k in range(1, 289)}
        report = day_bill(full_day(loads, pil=3.0))
        assert report.penalty_total > 0.0


class TestCompareReports:
    def test_case_totals(self):
        baseline = BillReport(total_cost=88.59, base_cost=88.59, penalty_total=0, peak_kw=3.0)
        scheduled = BillReport(total_cost=85.07, base_cost=85.07, penalty_total=0, peak_kw=2.0)
        savings, peak = compare_reports(baseline, scheduled)
        assert savings == pytest.approx(3.97, abs=0.01)
        assert peak == pytest.approx(100 * (3.0 - 2.0) / 3.0)

    def test_second_case_totals(self):
        baseline = BillReport(total_cost=86.02, base_cost=86.02, penalty_total=0, peak_kw=3.0)
        scheduled = BillReport(total_cost=81.51, base_cost=81.51, penalty_total=0, peak_kw=3.0)
        savings, _ = compare_reports(baseline, scheduled)
        assert savings == pytest.approx(5.24, abs=0.01)

    def test_identity(self):
        report = BillReport(total_cost=50.0, base_cost=50.0, penalty_total=0, peak_kw=2.5)
        assert compare_reports(report, report) == (0.0, 0.0)

    def test_zero_baseline_is_undefined(self):
        zero = BillReport(total_cost=0.0, base_cost=0.0, penalty_total=0, peak_kw=0.0)
        other = BillReport(total_cost=1.0, base_cost=1.0, penalty_total=0, peak_kw=1.0)
        with pytest.raises(ValidationError):
            compare_reports(zero, other)
