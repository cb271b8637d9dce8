"""Thermostatically controlled appliance model: hysteresis switching around a
set point plus a first-order room-temperature response.

While the appliance is off the room relaxes toward the hourly ambient profile
at ``drift_rate`` per interval; while on, ``actuation_c`` degrees are added on
top of the drift (negative for cooling, positive for heating).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from homedr.core import INTERVALS_PER_HOUR, ValidationError, check_interval


class TcaMode(enum.Enum):
    COOLING = "cooling"
    HEATING = "heating"


@dataclass(frozen=True)
class TcaConfig:
    appliance: str
    mode: TcaMode
    set_point_c: float
    tolerance_c: float
    ambient_c: tuple[float, ...]
    drift_rate: float
    actuation_c: float
    operating_windows: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.tolerance_c < 0:
            raise ValidationError("tca.tolerance_c", f"must be >= 0, got {self.tolerance_c}")
        if len(self.ambient_c) != 24:
            raise ValidationError("tca.ambient_c", f"expected 24 hourly values, got {len(self.ambient_c)}")
        if not 0 < self.drift_rate <= 1:
            raise ValidationError("tca.drift_rate", f"must be in (0, 1], got {self.drift_rate}")
        if self.mode is TcaMode.COOLING and self.actuation_c >= 0:
            raise ValidationError("tca.actuation_c", "cooling actuation must be negative")
        if self.mode is TcaMode.HEATING and self.actuation_c <= 0:
            raise ValidationError("tca.actuation_c", "heating actuation must be positive")
        for start, end in self.operating_windows:
            check_interval(start, "tca.windows.start")
            check_interval(end, "tca.windows.end")
            if start > end:
                raise ValidationError("tca.windows", f"window ({start}, {end}) is reversed")

    def ambient_at(self, k: int) -> float:
        check_interval(k)
        return self.ambient_c[(k - 1) // INTERVALS_PER_HOUR]

    def in_window(self, k: int) -> bool:
        return any(start <= k <= end for start, end in self.operating_windows)


@dataclass(frozen=True)
class TcaState:
    room_c: float
    u_prev: int = 0

    def __post_init__(self):
        if self.u_prev not in (0, 1):
            raise ValidationError("tca.u_prev", f"must be 0 or 1, got {self.u_prev}")
        if not math.isfinite(self.room_c):
            raise ValidationError("tca.room_c", f"must be finite, got {self.room_c}")


def thermostat_decide(cfg: TcaConfig, state: TcaState) -> int:
    """Hysteresis on/off decision for an armed TCA.

    Cooling: off below the set point, on above set point + tolerance, and the
    previous status is held inside the band.  Heating mirrors the band below
    the set point.
    """
    if cfg.mode is TcaMode.COOLING:
        if state.room_c < cfg.set_point_c:
            return 0
        if state.room_c > cfg.set_point_c + cfg.tolerance_c:
            return 1
        return state.u_prev
    if state.room_c < cfg.set_point_c - cfg.tolerance_c:
        return 1
    if state.room_c > cfg.set_point_c:
        return 0
    return state.u_prev


def room_temperature_step(cfg: TcaConfig, state: TcaState, u: int, k: int) -> float:
    """Room temperature after one interval with appliance status ``u``."""
    ambient = cfg.ambient_at(k)
    return state.room_c + cfg.drift_rate * (ambient - state.room_c) + u * cfg.actuation_c
