"""Scenario files and result artifacts.

Scenarios are JSON documents with times as 'HH:MM' strings (5-minute
granularity) and ratings in watts; in memory everything is interval indices
and kilowatts.  Results are written as diffable CSV/JSON with all floats at 4
decimal places, so repeated runs of the same scenario are byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from homedr.billing import BillReport
from homedr.core import (
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
)
from homedr.simulator import ComparisonResult, DayResult, Scenario
from homedr.thermal import TcaConfig, TcaMode


def _require(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise ValidationError(f"{path}.{key}" if path else key, "missing required field")
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ValidationError(f"{path}.{key}" if path else key, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _span(entry: Any, path: str) -> tuple[int, int]:
    if not isinstance(entry, dict):
        raise ValidationError(path, "expected an object with 'start' and 'end' times")
    start = time_to_interval(_require(entry, "start", str, path), f"{path}.start")
    end = deadline_interval(_require(entry, "end", str, path), f"{path}.end")
    if start > end:
        raise ValidationError(path, f"span start {entry['start']} is not before end {entry['end']}")
    return start, end


def _schedule(doc: dict, key: str, kind: SignalKind, modes: tuple[str, str], value_key: str) -> SignalSchedule:
    section = _require(doc, key, dict, "")
    mode = _require(section, "mode", str, key)
    if mode == modes[0]:
        value = _require(section, value_key, float, key)
        try:
            return SignalSchedule.constant(kind, value)
        except ValidationError as exc:
            raise ValidationError(f"{key}.{value_key}", exc.reason) from None
    if mode == modes[1]:
        hourly = _require(section, "hourly", list, key)
        if len(hourly) != 24:
            raise ValidationError(f"{key}.hourly", f"expected 24 hourly values, got {len(hourly)}")
        for hour, value in enumerate(hourly):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValidationError(f"{key}.hourly[{hour}]", "expected a number")
        return SignalSchedule.from_hourly(kind, hourly)
    raise ValidationError(f"{key}.mode", f"expected '{modes[0]}' or '{modes[1]}', got {mode!r}")


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document into a :class:`Scenario`.

    Every rejection names the JSON path of the offending field.
    """
    if not isinstance(doc, dict):
        raise ValidationError("$", "scenario document must be a JSON object")
    meta = _require(doc, "meta", dict, "")
    name = _require(meta, "name", str, "meta")

    tariff = _schedule(doc, "tariff", SignalKind.TARIFF, ("flat", "tou"), "flat_value")
    pil = _schedule(doc, "pil", SignalKind.PIL, ("static", "dynamic"), "static_value")

    appliances = []
    seen: set[str] = set()
    for i, entry in enumerate(_require(doc, "appliances", list, "")):
        path = f"appliances[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(path, "expected an object")
        app_name = _require(entry, "name", str, path)
        if app_name in seen:
            raise ValidationError(f"{path}.name", f"duplicate appliance name {app_name!r}")
        seen.add(app_name)
        category_text = _require(entry, "category", str, path)
        try:
            category = LoadCategory(category_text)
        except ValueError:
            raise ValidationError(f"{path}.category", f"unknown category {category_text!r}") from None
        rating_w = _require(entry, "rating_w", float, path)
        if rating_w <= 0:
            raise ValidationError(f"{path}.rating_w", f"must be > 0, got {rating_w}")
        appliances.append(ApplianceSpec(name=app_name, category=category, rating_kw=rating_w / 1000.0))

    requests = []
    for i, entry in enumerate(doc.get("requests", [])):
        path = f"requests[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(path, "expected an object")
        appliance = _require(entry, "appliance", str, path)
        s = time_to_interval(_require(entry, "s", str, path), f"{path}.s")
        f = deadline_interval(_require(entry, "f", str, path), f"{path}.f")
        r_min = _require(entry, "r_min", int, path)
        if r_min <= 0 or r_min % 5 != 0:
            raise ValidationError(f"{path}.r_min", f"run time must be a positive multiple of 5 minutes, got {r_min}")
        submit = entry.get("submit", 0)
        if not isinstance(submit, int) or isinstance(submit, bool) or submit < 0:
            raise ValidationError(f"{path}.submit", f"expected a nonnegative interval index, got {submit!r}")
        baseline_ot = tuple(_span(span, f"{path}.baseline_ot[{j}]") for j, span in enumerate(entry.get("baseline_ot", [])))
        try:
            requests.append(
                SlRequest(appliance=appliance, s=s, f=f, r_min=r_min, submit_k=submit, baseline_ot=baseline_ot)
            )
        except ValidationError as exc:
            field = exc.field.split(".")[-1]
            raise ValidationError(f"{path}.{field}", exc.reason) from None

    spans: dict[str, tuple[tuple[int, int], ...]] = {}
    for i, entry in enumerate(doc.get("nsl_script", [])):
        path = f"nsl_script[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(path, "expected an object")
        appliance = _require(entry, "appliance", str, path)
        if appliance in spans:
            raise ValidationError(f"{path}.appliance", f"duplicate script entry for {appliance!r}")
        entry_spans = tuple(_span(span, f"{path}.spans[{j}]") for j, span in enumerate(_require(entry, "spans", list, path)))
        spans[appliance] = entry_spans
    try:
        script = NslActivityScript(spans)
    except ValidationError as exc:
        raise ValidationError(f"nsl_script.{exc.field}", exc.reason) from None

    tca = None
    if doc.get("tca") is not None:
        section = _require(doc, "tca", dict, "")
        mode_text = _require(section, "mode", str, "tca")
        try:
            mode = TcaMode(mode_text)
        except ValueError:
            raise ValidationError("tca.mode", f"expected 'cooling' or 'heating', got {mode_text!r}") from None
        ambient = _require(section, "ambient_c", list, "tca")
        if len(ambient) != 24:
            raise ValidationError("tca.ambient_c", f"expected 24 hourly values, got {len(ambient)}")
        windows = tuple(_span(w, f"tca.windows[{j}]") for j, w in enumerate(section.get("windows", [])))
        tca = TcaConfig(
            appliance=_require(section, "appliance", str, "tca"),
            mode=mode,
            set_point_c=_require(section, "set_point_c", float, "tca"),
            tolerance_c=_require(section, "tolerance_c", float, "tca"),
            ambient_c=tuple(float(v) for v in ambient),
            drift_rate=_require(section, "drift_rate", float, "tca"),
            actuation_c=_require(section, "actuation_c", float, "tca"),
            operating_windows=windows,
        )

    initial_room = doc.get("initial_room_c")
    if initial_room is not None and (isinstance(initial_room, bool) or not isinstance(initial_room, (int, float))):
        raise ValidationError("initial_room_c", f"expected a number, got {initial_room!r}")

    return Scenario(
        name=name,
        appliances=tuple(appliances),
        tariff=tariff,
        pil=pil,
        requests=tuple(requests),
        nsl_script=script,
        tca=tca,
        initial_room_c=float(initial_room) if initial_room is not None else None,
        currency_label=meta.get("currency_label", "INR"),
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario JSON file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("$", f"not valid JSON: {exc}") from None
    return parse_scenario(doc)


def _span_to_times(span: tuple[int, int]) -> dict[str, str]:
    return {"start": interval_start_time(span[0]), "end": interval_end_time(span[1])}


def serialize_scenario(scenario: Scenario) -> dict:
    """Inverse of :func:`parse_scenario` (field-for-field round trip)."""
    doc: dict[str, Any] = {
        "meta": {"name": scenario.name, "currency_label": scenario.currency_label},
        "tariff": (
            {"mode": "flat", "flat_value": scenario.tariff.hourly[0]}
            if scenario.tariff.flat
            else {"mode": "tou", "hourly": list(scenario.tariff.hourly)}
        ),
        "pil": (
            {"mode": "static", "static_value": scenario.pil.hourly[0]}
            if scenario.pil.flat
            else {"mode": "dynamic", "hourly": list(scenario.pil.hourly)}
        ),
        "appliances": [
            {"name": a.name, "category": a.category.value, "rating_w": round(a.rating_kw * 1000.0, 6)}
            for a in scenario.appliances
        ],
        "requests": [
            {
                "appliance": r.appliance,
                "submit": r.submit_k,
                "s": interval_start_time(r.s),
                "f": interval_end_time(r.f),
                "r_min": r.r_min,
                "baseline_ot": [_span_to_times(span) for span in r.baseline_ot],
            }
            for r in scenario.requests
        ],
        "nsl_script": [
            {"appliance": name, "spans": [_span_to_times(span) for span in spans]}
            for name, spans in scenario.nsl_script.spans.items()
        ],
    }
    if scenario.tca is not None:
        cfg = scenario.tca
        doc["tca"] = {
            "appliance": cfg.appliance,
            "mode": cfg.mode.value,
            "set_point_c": cfg.set_point_c,
            "tolerance_c": cfg.tolerance_c,
            "ambient_c": list(cfg.ambient_c),
            "drift_rate": cfg.drift_rate,
            "actuation_c": cfg.actuation_c,
            "windows": [_span_to_times(w) for w in cfg.operating_windows],
        }
    if scenario.initial_room_c is not None:
        doc["initial_room_c"] = scenario.initial_room_c
    return doc


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def day_report_dict(day: DayResult) -> dict:
    """The report.json payload for one day run.

    Totals re-sum from the 4-decimal interval values written to the CSV so
    both artifacts agree exactly.
    """
    cost_total = round(sum(round(r.bill.total_cost, 4) for r in day.rows), 4)
    penalty_total = round(sum(round(r.bill.penalty_cost, 4) for r in day.rows), 4)
    return {
        "scenario": day.scenario_name,
        "mode": day.mode,
        "total_cost": cost_total,
        "base_cost": round(cost_total - penalty_total, 4),
        "penalty_total": penalty_total,
        "peak_kw": round(day.report.peak_kw, 4),
        "per_load": {name: round(cost, 4) for name, cost in sorted(day.report.per_load.items())},
        "infeasible_forced": sorted(day.infeasible_forced),
    }


def comparison_report_dict(comparison: ComparisonResult) -> dict:
    return {
        "scenario": comparison.baseline.scenario_name,
        "baseline_total": round(comparison.baseline.report.total_cost, 4),
        "scheduled_total": round(comparison.scheduled.report.total_cost, 4),
        "baseline_peak_kw": round(comparison.baseline.report.peak_kw, 4),
        "scheduled_peak_kw": round(comparison.scheduled.report.peak_kw, 4),
        "savings_pct": round(comparison.savings_pct, 4),
        "peak_reduction_pct": round(comparison.peak_reduction_pct, 4),
        "loads": [
            {
                "appliance": load.appliance,
                "baseline_spans": [_span_to_times(s) for s in load.baseline_spans],
                "scheduled_spans": [_span_to_times(s) for s in load.scheduled_spans],
                "baseline_cost": round(load.baseline_cost, 4),
                "scheduled_cost": round(load.scheduled_cost, 4),
            }
            for load in comparison.loads
        ],
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_day(day: DayResult, scenario: Scenario, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    curve_path = out_dir / "load_curve.csv"
    with curve_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["interval", "time", "total_kw", "pil_kw", "price", "cost", "penalty"])
        for row in day.rows:
            writer.writerow(
                [
                    row.k,
                    row.time,
                    _fmt(row.total_kw),
                    _fmt(row.pil_kw),
                    _fmt(row.price),
                    _fmt(row.bill.total_cost),
                    _fmt(row.bill.penalty_cost),
                ]
            )

    schedule_path = out_dir / "schedule.csv"
    spans: list[tuple[int, int, str, str, bool]] = []
    for spec in scenario.appliances:
        current: tuple[int, int, bool] | None = None  # start, end, forced
        for row in day.rows:
            onf = (row.statuses.get(spec.name, False), spec.name in row.forced)
            if onf[0]:
                if current is not None and current[1] == row.k - 1 and current[2] == onf[1]:
                    current = (current[0], row.k, current[2])
                else:
                    if current is not None:
                        spans.append((current[0], current[1], spec.name, spec.category.value, current[2]))
                    current = (row.k, row.k, onf[1])
            elif current is not None:
                spans.append((current[0], current[1], spec.name, spec.category.value, current[2]))
                current = None
        if current is not None:
            spans.append((current[0], current[1], spec.name, spec.category.value, current[2]))
    spans.sort(key=lambda s: (s[0], s[2]))
    with schedule_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["appliance", "category", "start", "end", "forced"])
        for start, end, name, category, forced in spans:
            writer.writerow([name, category, interval_start_time(start), interval_end_time(end), str(forced).lower()])

    report_path = out_dir / "report.json"
    _write_json(report_path, day_report_dict(day))
    return [curve_path, schedule_path, report_path]


def export_results(
    day: DayResult,
    scenario: Scenario,
    out_dir: str | Path,
    comparison: ComparisonResult | None = None,
) -> list[Path]:
    """Write result artifacts under ``out_dir``; returns the paths written.

    A plain day run produces load_curve.csv, schedule.csv and report.json.
    With a comparison the baseline and scheduled sets go into subdirectories
    plus a top-level comparison.json.
    """
    out = Path(out_dir)
    try:
        if comparison is None:
            return _write_day(day, scenario, out)
        paths = _write_day(comparison.baseline, scenario, out / "baseline")
        paths += _write_day(comparison.scheduled, scenario, out / "scheduled")
        comparison_path = out / "comparison.json"
        _write_json(comparison_path, comparison_report_dict(comparison))
        return paths + [comparison_path]
    except OSError as exc:
        raise OSError(f"cannot write results under {out}: {exc}") from exc
