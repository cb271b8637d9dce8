"""Household demand-response scheduling: a 288-interval day simulator with a
dynamic-priority load scheduler, tariff/PIL billing, and a live session API.
"""

from homedr.billing import BillReport, IntervalBill, compare_reports, day_bill, interval_energy_cost
from homedr.core import (
    INTERVALS_PER_DAY,
    ApplianceSpec,
    LoadCategory,
    NslActivityScript,
    SignalKind,
    SignalSchedule,
    SlRequest,
    ValidationError,
    deadline_interval,
    interval_end_time,
    interval_start_time,
    time_to_interval,
    value_at,
)
from homedr.scenario_io import export_results, load_scenario, parse_scenario, serialize_scenario
from homedr.simulator import DayResult, Scenario, SimulationSession, compare, run_baseline, run_scheduled

__all__ = [
    "INTERVALS_PER_DAY",
    "ApplianceSpec",
    "BillReport",
    "DayResult",
    "IntervalBill",
    "LoadCategory",
    "NslActivityScript",
    "Scenario",
    "SignalKind",
    "SignalSchedule",
    "SimulationSession",
    "SlRequest",
    "ValidationError",
    "compare",
    "compare_reports",
    "day_bill",
    "deadline_interval",
    "export_results",
    "interval_end_time",
    "interval_start_time",
    "interval_energy_cost",
    "load_scenario",
    "parse_scenario",
    "run_baseline",
    "run_scheduled",
    "serialize_scenario",
    "time_to_interval",
    "value_at",
]
