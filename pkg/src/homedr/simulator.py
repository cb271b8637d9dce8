"""Full-day simulation: threads the consumer activity script, thermostat
state, scheduler decisions, and billing through all 288 intervals.

Two modes share the same nonschedulable-load pipeline: ``run_baseline``
replays the consumer's stated operating times untouched, ``run_scheduled``
lets the scheduler place every request.  ``SimulationSession`` exposes the
scheduled run interval by interval for the live service.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from homedr.billing import BillReport, IntervalBill, IntervalLoads, day_bill, interval_energy_cost
from homedr.core import (
    INTERVALS_PER_DAY,
    ApplianceSpec,
    LoadCategory,
    NslActivityScript,
    SignalSchedule,
    SlRequest,
    ValidationError,
    interval_start_time,
    value_at,
)
from homedr.scheduler import (
    RequestPhase,
    SchedulerState,
    dynamic_priority,
    must_run,
    new_scheduler_state,
    scheduler_step,
)
from homedr.thermal import TcaConfig, TcaState, room_temperature_step, thermostat_decide


@dataclass(frozen=True)
class Scenario:
    name: str
    appliances: tuple[ApplianceSpec, ...]
    tariff: SignalSchedule
    pil: SignalSchedule
    requests: tuple[SlRequest, ...] = ()
    nsl_script: NslActivityScript = field(default_factory=NslActivityScript)
    tca: TcaConfig | None = None
    initial_room_c: float | None = None
    currency_label: str = "INR"

    def __post_init__(self):
        specs = {}
        for spec in self.appliances:
            if spec.name in specs:
                raise ValidationError(f"appliances[{spec.name}]", "duplicate appliance name")
            specs[spec.name] = spec
        for req in self.requests:
            spec = specs.get(req.appliance)
            if spec is None:
                raise ValidationError(f"requests[{req.appliance}]", "references an unknown appliance")
            if not spec.category.schedulable:
                raise ValidationError(
                    f"requests[{req.appliance}]", f"appliance is {spec.category.value}, not schedulable"
                )
        for name in self.nsl_script.spans:
            spec = specs.get(name)
            if spec is None:
                raise ValidationError(f"nsl_script[{name}]", "references an unknown appliance")
            if spec.category is not LoadCategory.NINSL:
                raise ValidationError(f"nsl_script[{name}]", "activity scripts apply to NINSL appliances only")
        if self.tca is not None:
            spec = specs.get(self.tca.appliance)
            if spec is None:
                raise ValidationError("tca.appliance", "references an unknown appliance")
            if spec.category is not LoadCategory.INSL:
                raise ValidationError("tca.appliance", f"must be an INSL appliance, got {spec.category.value}")

    def spec(self, name: str) -> ApplianceSpec:
        for appliance in self.appliances:
            if appliance.name == name:
                return appliance
        raise KeyError(name)

    @property
    def schedulable_names(self) -> frozenset[str]:
        return frozenset(a.name for a in self.appliances if a.category.schedulable)


@dataclass(frozen=True)
class IntervalRecord:
    """One simulated interval: who ran, at what signal levels, and the bill."""

    k: int
    statuses: dict[str, bool]
    forced: frozenset[str]
    total_kw: float
    pil_kw: float
    pil_eff_kw: float
    price: float
    bill: IntervalBill
    room_c: float | None

    @property
    def time(self) -> str:
        return interval_start_time(self.k)


@dataclass(frozen=True)
class DayResult:
    mode: str
    scenario_name: str
    rows: tuple[IntervalRecord, ...]
    report: BillReport
    infeasible_forced: frozenset[str] = frozenset()

    def on_intervals(self, name: str) -> list[int]:
        return [row.k for row in self.rows if row.statuses.get(name, False)]

    def on_spans(self, name: str) -> list[tuple[int, int]]:
        return _to_spans(self.on_intervals(name))


def _to_spans(intervals: list[int]) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    for k in intervals:
        if spans and spans[-1][1] == k - 1:
            spans[-1] = (spans[-1][0], k)
        else:
            spans.append((k, k))
    return spans


class _NslPipeline:
    """Per-interval nonschedulable statuses: scripted NINSLs plus the TCA."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        cfg = scenario.tca
        if cfg is not None:
            room = scenario.initial_room_c if scenario.initial_room_c is not None else cfg.ambient_at(1)
            self.tca_state: TcaState | None = TcaState(room_c=room, u_prev=0)
        else:
            self.tca_state = None

    def advance(self, k: int) -> tuple[dict[str, bool], float | None]:
        """Statuses of every NSL during interval ``k``; evolves room temperature."""
        statuses = {
            a.name: self.scenario.nsl_script.is_on(a.name, k)
            for a in self.scenario.appliances
            if a.category is LoadCategory.NINSL
        }
        room = None
        cfg = self.scenario.tca
        if cfg is not None and self.tca_state is not None:
            u = thermostat_decide(cfg, self.tca_state) if cfg.in_window(k) else 0
            statuses[cfg.appliance] = bool(u)
            room = self.tca_state.room_c
            self.tca_state = TcaState(room_c=room_temperature_step(cfg, self.tca_state, u, k), u_prev=u)
        return statuses, room


def _record_interval(
    scenario: Scenario,
    k: int,
    statuses: dict[str, bool],
    forced: frozenset[str],
    pil_eff: float,
    room: float | None,
) -> IntervalRecord:
    price = value_at(scenario.tariff, k)
    pil = value_at(scenario.pil, k)
    statuses = {a.name: statuses.get(a.name, False) for a in scenario.appliances}
    total_kw = sum(scenario.spec(name).rating_kw for name, on in statuses.items() if on)
    bill = interval_energy_cost(k, total_kw, pil, price)
    return IntervalRecord(
        k=k,
        statuses=statuses,
        forced=forced,
        total_kw=total_kw,
        pil_kw=pil,
        pil_eff_kw=pil_eff,
        price=price,
        bill=bill,
        room_c=room,
    )


def _finish(scenario: Scenario, mode: str, rows: list[IntervalRecord], infeasible: frozenset[str]) -> DayResult:
    loads = [
        IntervalLoads(
            k=row.k,
            price=row.price,
            pil_kw=row.pil_kw,
            loads_kw={n: scenario.spec(n).rating_kw for n, on in row.statuses.items() if on},
        )
        for row in rows
    ]
    report = day_bill(loads, schedulable=scenario.schedulable_names)
    return DayResult(
        mode=mode,
        scenario_name=scenario.name,
        rows=tuple(rows),
        report=report,
        infeasible_forced=infeasible,
    )


def run_baseline(scenario: Scenario) -> DayResult:
    """Replay the consumer's stated operating times with no scheduling."""
    for req in scenario.requests:
        prefix = f"requests[{req.appliance}].baseline_ot"
        if not req.baseline_ot:
            raise ValidationError(prefix, "baseline run requires an operating-time span")
        length = sum(end - start + 1 for start, end in req.baseline_ot)
        if length != req.r_intervals:
            raise ValidationError(
                prefix, f"operating time covers {length} intervals but the run time needs {req.r_intervals}"
            )
    nsl = _NslPipeline(scenario)
    rows: list[IntervalRecord] = []
    for k in range(1, INTERVALS_PER_DAY + 1):
        statuses, room = nsl.advance(k)
        nsl_total = sum(scenario.spec(n).rating_kw for n, on in statuses.items() if on)
        for req in scenario.requests:
            statuses[req.appliance] = any(start <= k <= end for start, end in req.baseline_ot)
        pil_eff = value_at(scenario.pil, k) - nsl_total
        rows.append(_record_interval(scenario, k, statuses, frozenset(), pil_eff, room))
    return _finish(scenario, "baseline", rows, frozenset())


class SimulationSession:
    """A scheduled-mode day that advances interval by interval.

    Requests embedded in the scenario are queued from their submission
    interval; more can arrive while the day runs via :meth:`submit`, which
    enforces the one-interval-ahead rule.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.current_k = 0
        self._nsl = _NslPipeline(scenario)
        self._sched: SchedulerState = new_scheduler_state(
            scenario.appliances, scenario.requests, scenario.tariff, scenario.pil
        )
        self._rows: list[IntervalRecord] = []

    @property
    def finished(self) -> bool:
        return self.current_k >= INTERVALS_PER_DAY

    @property
    def rows(self) -> tuple[IntervalRecord, ...]:
        return tuple(self._rows)

    @property
    def scheduler_state(self) -> SchedulerState:
        return self._sched

    def submit(self, request: SlRequest) -> None:
        """Enter a new request effective from the next interval.

        Raises ValidationError if the request arrives later than one interval
        before its start window or duplicates a pending appliance request.
        The :class:`SlRequest` constructor has already rejected windows too
        short for the run time.
        """
        at_k = self.current_k + 1
        prefix = f"request[{request.appliance}]"
        if at_k >= request.s:
            raise ValidationError(
                f"{prefix}.s",
                f"must be submitted at least one interval before s={request.s}; the session is at interval {at_k}",
            )
        if any(r.name == request.appliance and r.phase is not RequestPhase.COMPLETED for r in self._sched.requests):
            raise ValidationError(f"{prefix}", "an open request for this appliance already exists")
        self.scenario.spec(request.appliance)  # raises KeyError for unknown names
        if not self.scenario.spec(request.appliance).category.schedulable:
            raise ValidationError(f"{prefix}", "appliance is not schedulable")
        live = replace(request, submit_k=self.current_k)
        self._sched = replace(
            self._sched,
            requests=self._sched.requests
            + (
                new_scheduler_state(self.scenario.appliances, [live], self.scenario.tariff, self.scenario.pil).requests
            ),
        )

    def advance_to(self, to_k: int) -> None:
        if not self.current_k < to_k <= INTERVALS_PER_DAY:
            raise ValidationError(
                "to_k", f"must advance forward within the day: current={self.current_k}, requested={to_k}"
            )
        for k in range(self.current_k + 1, to_k + 1):
            statuses, room = self._nsl.advance(k)
            nsl_powers = [self.scenario.spec(n).rating_kw for n, on in statuses.items() if on]
            price = value_at(self.scenario.tariff, k)
            pil = value_at(self.scenario.pil, k)
            decision, self._sched = scheduler_step(self._sched, k, price, pil, nsl_powers)
            for req in self._sched.requests:
                statuses[req.name] = req.name in decision.on_loads
            self._rows.append(
                _record_interval(self.scenario, k, statuses, decision.forced, decision.pil_new_kw, room)
            )
        self.current_k = to_k

    def result(self) -> DayResult:
        if not self.finished:
            raise ValidationError("session", f"day incomplete: at interval {self.current_k} of {INTERVALS_PER_DAY}")
        infeasible = frozenset(r.name for r in self._sched.requests if r.infeasible_forced)
        return _finish(self.scenario, "scheduled", self._rows, infeasible)

    def request_metrics(self) -> list[dict]:
        """Live view of every request's progress, priority, and next-interval CPR."""
        k_next = min(self.current_k + 1, INTERVALS_PER_DAY)
        out = []
        for req in self._sched.requests:
            entry = {
                "appliance": req.name,
                "category": req.category.value,
                "s": req.request.s,
                "f": req.request.f,
                "r_intervals": req.request.r_intervals,
                "remaining_intervals": req.remaining,
                "state": req.phase.value,
                "dp": None,
                "cpr": None,
                "must_run": False,
                "infeasible_forced": req.infeasible_forced,
            }
            if req.phase is not RequestPhase.COMPLETED and req.request.s <= k_next:
                try:
                    entry["dp"] = round(dynamic_priority(req, k_next), 4)
                except Exception:
                    entry["dp"] = None
                entry["must_run"] = must_run(req, k_next)
                pil_next = value_at(self.scenario.pil, k_next)
                price_next = value_at(self.scenario.tariff, k_next)
                denominator = 60.0 * pil_next
                entry["cpr"] = round(req.rating_kw * price_next * req.remaining * 5 / denominator, 4)
            out.append(entry)
        return out


def run_scheduled(scenario: Scenario) -> DayResult:
    """Run the whole day under the demand-response scheduler."""
    session = SimulationSession(scenario)
    session.advance_to(INTERVALS_PER_DAY)
    return session.result()


def submit_request(session: SimulationSession, request: SlRequest) -> tuple[bool, str]:
    """Try to enter ``request`` into a running session; (accepted, reason)."""
    try:
        session.submit(request)
    except (ValidationError, KeyError) as exc:
        return False, str(exc)
    return True, "accepted"


@dataclass(frozen=True)
class LoadComparison:
    appliance: str
    baseline_spans: tuple[tuple[int, int], ...]
    scheduled_spans: tuple[tuple[int, int], ...]
    baseline_cost: float
    scheduled_cost: float


@dataclass(frozen=True)
class ComparisonResult:
    baseline: DayResult
    scheduled: DayResult
    savings_pct: float
    peak_reduction_pct: float
    loads: tuple[LoadComparison, ...]


def compare(scenario: Scenario) -> ComparisonResult:
    """Run both modes on identical signals and report savings and peak relief."""
    from homedr.billing import compare_reports

    baseline = run_baseline(scenario)
    scheduled = run_scheduled(scenario)
    savings, peak_reduction = compare_reports(baseline.report, scheduled.report)
    loads = tuple(
        LoadComparison(
            appliance=spec.name,
            baseline_spans=tuple(baseline.on_spans(spec.name)),
            scheduled_spans=tuple(scheduled.on_spans(spec.name)),
            baseline_cost=baseline.report.per_load.get(spec.name, 0.0),
            scheduled_cost=scheduled.report.per_load.get(spec.name, 0.0),
        )
        for spec in scenario.appliances
    )
    return ComparisonResult(
        baseline=baseline,
        scheduled=scheduled,
        savings_pct=savings,
        peak_reduction_pct=peak_reduction,
        loads=loads,
    )
