"""The demand-response decision loop.

Each interval the scheduler measures nonschedulable consumption to update the
effective power import limit, forces loads whose dynamic priority has reached
1 (they can no longer wait), and places the remaining schedulable loads into
their cheapest intervals by cost-to-power ratio: interruptible loads take the
lowest-rated set of intervals, noninterruptible loads the lowest-rated
contiguous window.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, replace

from homedr.core import (
    ApplianceSpec,
    LoadCategory,
    SignalSchedule,
    SlRequest,
    ValidationError,
    value_at,
)

MUST_RUN_PRIORITY = 1.0


class InfeasibleRequestError(ValueError):
    """A request can no longer complete inside its window."""


class RequestPhase(enum.Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"


@dataclass(frozen=True)
class RequestState:
    """Runtime progress of one schedulable-load request."""

    request: SlRequest
    category: LoadCategory
    rating_kw: float
    remaining: int
    phase: RequestPhase = RequestPhase.PENDING
    window_start: int | None = None  # committed window, noninterruptible only
    infeasible_forced: bool = False

    @property
    def name(self) -> str:
        return self.request.appliance

    @property
    def window_end(self) -> int | None:
        if self.window_start is None:
            return None
        return self.window_start + self.request.r_intervals - 1


@dataclass(frozen=True)
class SchedulerState:
    """Immutable scheduler snapshot; ``step`` returns the successor state."""

    tariff: SignalSchedule
    pil: SignalSchedule
    requests: tuple[RequestState, ...]
    current_k: int = 0


@dataclass(frozen=True)
class IntervalDecision:
    k: int
    on_loads: frozenset[str]
    forced: frozenset[str]
    pil_new_kw: float


def new_scheduler_state(
    appliances: Iterable[ApplianceSpec],
    requests: Iterable[SlRequest],
    tariff: SignalSchedule,
    pil: SignalSchedule,
) -> SchedulerState:
    specs = {a.name: a for a in appliances}
    states = []
    for req in requests:
        spec = specs.get(req.appliance)
        if spec is None:
            raise ValidationError(f"request[{req.appliance}]", "references an unknown appliance")
        if not spec.category.schedulable:
            raise ValidationError(f"request[{req.appliance}]", f"{spec.category.value} loads cannot be scheduled")
        states.append(RequestState(req, spec.category, spec.rating_kw, remaining=req.r_intervals))
    return SchedulerState(tariff=tariff, pil=pil, requests=tuple(states))


def effective_pil(pil_old_kw: float, nsl_powers_kw: Iterable[float]) -> float:
    """Headroom left for schedulable loads once nonschedulable draw is metered.

    May be negative: any schedulable operation then runs into penalty-rate
    consumption.
    """
    if pil_old_kw <= 0:
        raise ValidationError("pil", f"utility PIL must be > 0, got {pil_old_kw}")
    return pil_old_kw - sum(nsl_powers_kw)


def dynamic_priority(state: RequestState, k: int) -> float:
    """Urgency of a request at interval ``k``: k over its latest feasible start.

    Grows toward 1.0 as the latest start approaches; at or above 1.0 the load
    must run to meet its deadline.
    """
    if state.phase is RequestPhase.COMPLETED:
        raise ValidationError(f"request[{state.name}]", "priority of a completed request is undefined")
    if k < state.request.s:
        raise ValidationError(f"request[{state.name}]", f"priority not defined before s={state.request.s}")
    denominator = state.request.f - state.remaining + 1
    if denominator <= 0:
        raise InfeasibleRequestError(
            f"{state.name}: {state.remaining} intervals remain but the deadline is {state.request.f}"
        )
    return k / denominator


def must_run(state: RequestState, k: int) -> bool:
    """True when the request has no slack left: it needs every interval
    through its deadline (equivalently, its dynamic priority is >= 1)."""
    if state.phase is RequestPhase.COMPLETED:
        return False
    return state.remaining >= state.request.f - k + 1


def cost_power_ratio(p_kw: float, price: float, r_rem_min: int, pil_eff_kw: float) -> float:
    """Attractiveness of running a load in an interval: lower is better.

    Scales the energy price by the load's power and remaining minutes and
    divides by the import headroom; no headroom means the interval is
    maximally unattractive (+inf) yet still orderable.
    """
    if r_rem_min <= 0:
        raise ValidationError("r_rem_min", f"remaining run time must be > 0, got {r_rem_min}")
    if pil_eff_kw <= 0:
        return math.inf
    return (p_kw * price * r_rem_min) / (60.0 * pil_eff_kw)


def plan_interruptible(r_rem: int, cpr_by_interval: Mapping[int, float]) -> frozenset[int]:
    """The ``r_rem`` cheapest intervals by CPR, earlier intervals winning ties."""
    if len(cpr_by_interval) < r_rem:
        raise InfeasibleRequestError(f"need {r_rem} intervals, only {len(cpr_by_interval)} candidates remain")
    ranked = sorted(cpr_by_interval, key=lambda k: (cpr_by_interval[k], k))
    return frozenset(ranked[:r_rem])


def plan_noninterruptible(r_rem: int, cpr_by_interval: Mapping[int, float]) -> int:
    """Start of the contiguous ``r_rem``-long window with the lowest CPR sum.

    Candidates must form a contiguous index range; ties go to the earliest
    start.
    """
    if not cpr_by_interval:
        raise InfeasibleRequestError("no candidate intervals remain")
    first, last = min(cpr_by_interval), max(cpr_by_interval)
    if last - first + 1 != len(cpr_by_interval):
        raise ValidationError("cpr_by_interval", "candidate intervals must be contiguous")
    if last - first + 1 < r_rem:
        raise InfeasibleRequestError(f"no window of {r_rem} intervals fits in [{first}, {last}]")
    best_start, best_sum = first, math.inf
    window = 0.0
    for start in range(first, last - r_rem + 2):
        if start == first:
            window = sum(cpr_by_interval[j] for j in range(first, first + r_rem))
        else:
            window += cpr_by_interval[start + r_rem - 1] - cpr_by_interval[start - 1]
        if window < best_sum:
            best_start, best_sum = start, window
    return best_start


def scheduler_step(
    state: SchedulerState,
    k: int,
    price: float,
    pil_old_kw: float,
    nsl_powers_kw: Iterable[float],
) -> tuple[IntervalDecision, SchedulerState]:
    """Decide which schedulable loads run during interval ``k``.

    Order of business: update the effective PIL from metered NSL draw, keep
    running noninterruptible loads on, force every must-run load on, then let
    the rest contend in descending dynamic-priority order.  Each contender
    re-plans its cheapest intervals against day-ahead signals net of the
    power already claimed by higher-priority loads (the current interval
    using the live effective PIL) and runs now only if the current interval
    is in its plan and its rating still fits the live headroom.
    """
    pil_eff = effective_pil(pil_old_kw, nsl_powers_kw)
    allocated: dict[int, float] = {}

    def allocate(intervals: Iterable[int], kw: float) -> None:
        for j in intervals:
            allocated[j] = allocated.get(j, 0.0) + kw

    active = [
        r
        for r in state.requests
        if r.phase is not RequestPhase.COMPLETED and r.request.submit_k < k and r.request.s <= k
    ]
    on: set[str] = set()
    forced: set[str] = set()
    contenders: list[RequestState] = []
    started_windows: dict[str, int] = {}
    for req in active:
        if req.category is LoadCategory.NISL and req.phase is RequestPhase.RUNNING:
            # Noninterruptible: the committed window finishes unconditionally.
            on.add(req.name)
            allocate(range(k, req.window_end + 1), req.rating_kw)
            if must_run(req, k):
                forced.add(req.name)
        elif must_run(req, k) or k > req.request.f:
            on.add(req.name)
            forced.add(req.name)
            allocate(range(k, k + req.remaining), req.rating_kw)
            if req.category is LoadCategory.NISL and req.phase is RequestPhase.PENDING:
                started_windows[req.name] = k
        else:
            contenders.append(req)

    contenders.sort(key=lambda r: (-dynamic_priority(r, k), -r.rating_kw, r.name))
    for req in contenders:
        candidates: dict[int, float] = {}
        for j in range(max(k, req.request.s), req.request.f + 1):
            base_pil = pil_eff if j == k else value_at(state.pil, j)
            interval_price = price if j == k else value_at(state.tariff, j)
            headroom = base_pil - allocated.get(j, 0.0)
            candidates[j] = cost_power_ratio(req.rating_kw, interval_price, req.remaining * 5, headroom)
        if req.category is LoadCategory.ISL:
            plan = plan_interruptible(req.remaining, candidates)
        else:
            start = plan_noninterruptible(req.remaining, candidates)
            plan = frozenset(range(start, start + req.remaining))
        if k in plan and req.rating_kw <= pil_eff - allocated.get(k, 0.0):
            on.add(req.name)
            if req.category is LoadCategory.NISL:
                started_windows[req.name] = k
        allocate(plan, req.rating_kw)

    next_requests = []
    for req in state.requests:
        if req.name in on:
            remaining = req.remaining - 1
            req = replace(
                req,
                remaining=remaining,
                phase=RequestPhase.COMPLETED if remaining == 0 else RequestPhase.RUNNING,
                window_start=started_windows.get(req.name, req.window_start),
                infeasible_forced=req.infeasible_forced or k > req.request.f,
            )
        next_requests.append(req)

    decision = IntervalDecision(k=k, on_loads=frozenset(on), forced=frozenset(forced), pil_new_kw=pil_eff)
    return decision, replace(state, requests=tuple(next_requests), current_k=k)
