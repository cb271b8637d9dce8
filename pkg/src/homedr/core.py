"""Shared domain model: the 5-minute interval grid, load taxonomy, and
day-ahead signal schedules (tariff and power import limit).

A day is split into 288 intervals of 5 minutes; interval 1 covers
00:00:00-00:04:59 and interval 288 covers 23:55:00-23:59:59.  Tariff and
PIL values are constant within each clock hour (blocks of 12 intervals).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

INTERVALS_PER_DAY = 288
INTERVALS_PER_HOUR = 12
MINUTES_PER_INTERVAL = 5


class ValidationError(ValueError):
    """Input rejected; ``field`` names the offending field or JSON path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.reason = message


_TIME_RE = re.compile(r"^(\d{1,2}):(\d{2})$")


def _parse_time(text: str, field: str) -> int:
    """Parse 'HH:MM' to minutes since midnight, requiring 5-minute granularity."""
    m = _TIME_RE.match(text.strip()) if isinstance(text, str) else None
    if m is None:
        raise ValidationError(field, f"expected a 'HH:MM' time, got {text!r}")
    hours, minutes = int(m.group(1)), int(m.group(2))
    if minutes % MINUTES_PER_INTERVAL != 0:
        raise ValidationError(field, f"minutes must be a multiple of 5, got {text!r}")
    if minutes > 59 or hours > 24 or (hours == 24 and minutes != 0):
        raise ValidationError(field, f"not a valid time of day: {text!r}")
    return hours * 60 + minutes


def time_to_interval(text: str, field: str = "time") -> int:
    """Interval whose span begins at wall-clock ``text`` (start semantics).

    '00:00' maps to interval 1 and '23:55' to interval 288.  '24:00' has no
    start interval and is rejected; use :func:`deadline_interval` for span
    ends.
    """
    minutes = _parse_time(text, field)
    if minutes >= 24 * 60:
        raise ValidationError(field, "24:00 is only valid as a deadline / span end")
    return minutes // MINUTES_PER_INTERVAL + 1


def deadline_interval(text: str, field: str = "time") -> int:
    """Last interval that ends at or before wall-clock ``text`` (deadline semantics).

    '10:30' maps to interval 126; '00:00' and '24:00' both mean end of day
    (interval 288).
    """
    minutes = _parse_time(text, field)
    if minutes == 0 or minutes == 24 * 60:
        return INTERVALS_PER_DAY
    return minutes // MINUTES_PER_INTERVAL


def interval_start_time(k: int) -> str:
    """Wall-clock 'HH:MM' at which interval ``k`` begins."""
    check_interval(k)
    minutes = (k - 1) * MINUTES_PER_INTERVAL
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def interval_end_time(k: int) -> str:
    """Wall-clock 'HH:MM' at which interval ``k`` ends ('24:00' for interval 288)."""
    check_interval(k)
    minutes = k * MINUTES_PER_INTERVAL
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def check_interval(k: int, field: str = "interval") -> int:
    if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= INTERVALS_PER_DAY:
        raise ValidationError(field, f"interval index must be in [1, {INTERVALS_PER_DAY}], got {k!r}")
    return k


class LoadCategory(enum.Enum):
    """Appliance taxonomy: (non)interruptible x (non)schedulable."""

    NINSL = "NINSL"  # noninterruptible, nonschedulable (TV, lights, ...)
    INSL = "INSL"    # interruptible, nonschedulable (thermostat-controlled)
    NISL = "NISL"    # noninterruptible, schedulable (washing machine, ...)
    ISL = "ISL"      # interruptible, schedulable (EV charging, water pump)

    @property
    def schedulable(self) -> bool:
        return self in (LoadCategory.NISL, LoadCategory.ISL)

    @property
    def interruptible(self) -> bool:
        return self in (LoadCategory.INSL, LoadCategory.ISL)


@dataclass(frozen=True)
class ApplianceSpec:
    """A household load: unique name, category, and power rating in kW."""

    name: str
    category: LoadCategory
    rating_kw: float

    def __post_init__(self):
        if not self.name:
            raise ValidationError("name", "appliance name must be non-empty")
        if not math.isfinite(self.rating_kw) or self.rating_kw <= 0:
            raise ValidationError(f"{self.name}.rating", f"power rating must be > 0, got {self.rating_kw}")


@dataclass(frozen=True)
class SlRequest:
    """A consumer's request to run a schedulable load.

    ``s`` is the first interval the load may be on, ``f`` the last, and
    ``r_min`` the required run time in minutes (a multiple of 5).  The
    request is entered at interval ``submit_k`` (0 means day-ahead), which
    must precede ``s``.
    """

    appliance: str
    s: int
    f: int
    r_min: int
    submit_k: int = 0
    baseline_ot: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prefix = f"request[{self.appliance}]"
        check_interval(self.s, f"{prefix}.s")
        check_interval(self.f, f"{prefix}.f")
        if self.s > self.f:
            raise ValidationError(f"{prefix}.s", f"start window {self.s} is after deadline {self.f}")
        if self.r_min <= 0 or self.r_min % MINUTES_PER_INTERVAL != 0:
            raise ValidationError(f"{prefix}.r_min", f"run time must be a positive multiple of 5, got {self.r_min}")
        if self.r_intervals > self.f - self.s + 1:
            raise ValidationError(
                f"{prefix}.r_min",
                f"run time of {self.r_intervals} intervals does not fit the window [{self.s}, {self.f}]",
            )
        if not 0 <= self.submit_k < self.s:
            raise ValidationError(
                f"{prefix}.submit",
                f"must be submitted at least one interval before s={self.s}, got {self.submit_k}",
            )

    @property
    def r_intervals(self) -> int:
        return self.r_min // MINUTES_PER_INTERVAL

    @property
    def latest_start(self) -> int:
        return self.f - self.r_intervals + 1


class SignalKind(enum.Enum):
    TARIFF = "tariff"  # money per kWh
    PIL = "pil"        # kW


@dataclass(frozen=True)
class SignalSchedule:
    """Day-ahead hourly profile; constant within each 60-minute block.

    A flat tariff / static PIL is stored as 24 identical hourly values with
    ``flat`` set so scenario files round-trip.
    """

    kind: SignalKind
    hourly: tuple[float, ...]
    flat: bool = False

    def __post_init__(self):
        label = self.kind.value
        if len(self.hourly) != 24:
            raise ValidationError(f"{label}.hourly", f"expected 24 hourly values, got {len(self.hourly)}")
        for hour, value in enumerate(self.hourly):
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{label}.hourly[{hour}]", f"values must be > 0, got {value}")
        if self.flat and len(set(self.hourly)) != 1:
            raise ValidationError(f"{label}.hourly", "flat schedule must hold a single value")

    @classmethod
    def constant(cls, kind: SignalKind, value: float) -> SignalSchedule:
        return cls(kind, (value,) * 24, flat=True)

    @classmethod
    def from_hourly(cls, kind: SignalKind, values) -> SignalSchedule:
        return cls(kind, tuple(float(v) for v in values))


def value_at(schedule: SignalSchedule, k: int) -> float:
    """Schedule value during interval ``k`` (hour block ceil(k/12))."""
    check_interval(k)
    return schedule.hourly[(k - 1) // INTERVALS_PER_HOUR]


@dataclass(frozen=True)
class NslActivityScript:
    """Consumer-driven ON spans for each NINSL appliance, as inclusive
    interval pairs ``(k_start, k_end)``."""

    spans: dict[str, tuple[tuple[int, int], ...]] = field(default_factory=dict)

    def __post_init__(self):
        for name, pairs in self.spans.items():
            last_end = 0
            for start, end in sorted(pairs):
                check_interval(start, f"nsl_script[{name}].start")
                check_interval(end, f"nsl_script[{name}].end")
                if start > end:
                    raise ValidationError(f"nsl_script[{name}]", f"span ({start}, {end}) is reversed")
                if start <= last_end:
                    raise ValidationError(f"nsl_script[{name}]", f"span ({start}, {end}) overlaps an earlier span")
                last_end = end
        object.__setattr__(self, "spans", {n: tuple(sorted(p)) for n, p in self.spans.items()})

    def is_on(self, name: str, k: int) -> bool:
        return any(start <= k <= end for start, end in self.spans.get(name, ()))

    def on_loads(self, k: int) -> list[str]:
        return [name for name in self.spans if self.is_on(name, k)]
