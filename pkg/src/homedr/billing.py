"""Cost accounting: per-interval energy billing with a 2x-price penalty on
consumption above the power import limit, day totals with per-load
attribution, and baseline-vs-scheduled comparison figures.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from homedr.core import INTERVALS_PER_DAY, ValidationError, check_interval

HOURS_PER_INTERVAL = 5.0 / 60.0  # one interval is 1/12 h


@dataclass(frozen=True)
class IntervalBill:
    """Energy and cost split for one interval.

    Energy within the PIL is billed at the interval price; the excess above
    the PIL is billed at twice that price and reported as ``penalty_cost``.
    """

    k: int
    energy_kwh: float
    in_limit_kwh: float
    excess_kwh: float
    base_cost: float
    penalty_cost: float

    @property
    def total_cost(self) -> float:
        return self.base_cost + self.penalty_cost


@dataclass(frozen=True)
class IntervalLoads:
    """One interval's billing input: signals plus the kW of every load that is on."""

    k: int
    price: float
    pil_kw: float
    loads_kw: Mapping[str, float]

    @property
    def total_kw(self) -> float:
        return sum(self.loads_kw.values())


@dataclass(frozen=True)
class BillReport:
    total_cost: float
    base_cost: float
    penalty_total: float
    peak_kw: float
    per_load: dict[str, float] = field(default_factory=dict)


def interval_energy_cost(k: int, total_kw: float, pil_kw: float, price: float) -> IntervalBill:
    """Bill ``total_kw`` drawn for one 5-minute interval against ``pil_kw``."""
    check_interval(k)
    if total_kw < 0:
        raise ValidationError(f"interval[{k}].total_kw", f"must be >= 0, got {total_kw}")
    if pil_kw <= 0 or price <= 0:
        raise ValidationError(f"interval[{k}]", f"pil and price must be > 0, got pil={pil_kw}, price={price}")
    energy = total_kw * HOURS_PER_INTERVAL
    excess = max(0.0, total_kw - pil_kw) * HOURS_PER_INTERVAL
    in_limit = energy - excess
    return IntervalBill(
        k=k,
        energy_kwh=energy,
        in_limit_kwh=in_limit,
        excess_kwh=excess,
        base_cost=price * in_limit,
        penalty_cost=2.0 * price * excess,
    )


def day_bill(intervals: Iterable[IntervalLoads], schedulable: frozenset[str] = frozenset()) -> BillReport:
    """Total a full day of interval records into a :class:`BillReport`.

    Base cost is attributed to loads by their share of the interval's power;
    penalty is attributed to the schedulable loads that were on (the loads
    the scheduler could have moved), falling back to all loads on when none
    was.
    """
    rows = list(intervals)
    if len(rows) != INTERVALS_PER_DAY or [r.k for r in rows] != list(range(1, INTERVALS_PER_DAY + 1)):
        raise ValidationError("day", f"expected intervals 1..{INTERVALS_PER_DAY} exactly, got {len(rows)} rows")
    return accumulate_bill(rows, schedulable)


def accumulate_bill(intervals: Iterable[IntervalLoads], schedulable: frozenset[str] = frozenset()) -> BillReport:
    """Running bill over any prefix of the day (same attribution as day_bill)."""
    rows = list(intervals)
    total = base = penalty = peak = 0.0
    per_load: dict[str, float] = {}
    for row in rows:
        total_kw = row.total_kw
        bill = interval_energy_cost(row.k, total_kw, row.pil_kw, row.price)
        base += bill.base_cost
        penalty += bill.penalty_cost
        total += bill.total_cost
        peak = max(peak, total_kw)
        if total_kw <= 0:
            continue
        for name, kw in row.loads_kw.items():
            per_load[name] = per_load.get(name, 0.0) + bill.base_cost * kw / total_kw
        if bill.penalty_cost > 0:
            bearers = {n: kw for n, kw in row.loads_kw.items() if n in schedulable and kw > 0}
            if not bearers:
                bearers = {n: kw for n, kw in row.loads_kw.items() if kw > 0}
            bearer_kw = sum(bearers.values())
            for name, kw in bearers.items():
                per_load[name] = per_load.get(name, 0.0) + bill.penalty_cost * kw / bearer_kw
    return BillReport(total_cost=total, base_cost=base, penalty_total=penalty, peak_kw=peak, per_load=per_load)


def compare_reports(baseline: BillReport, scheduled: BillReport) -> tuple[float, float]:
    """(savings %, peak reduction %) of ``scheduled`` relative to ``baseline``."""
    if baseline.total_cost <= 0 or baseline.peak_kw <= 0:
        raise ValidationError("baseline", "comparison percentages are undefined for a zero baseline")
    savings = 100.0 * (baseline.total_cost - scheduled.total_cost) / baseline.total_cost
    peak_reduction = 100.0 * (baseline.peak_kw - scheduled.peak_kw) / baseline.peak_kw
    return savings, peak_reduction
