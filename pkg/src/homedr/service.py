"""Live scheduling sessions over HTTP.

A session wraps one scheduled-mode simulation that a client advances
interval by interval, entering new load requests along the way:

    POST /sessions                  scenario document -> {"id", "state"}
    GET  /sessions/{id}             -> state snapshot
    POST /sessions/{id}/requests    request body -> {"accepted", "reason", "state"}
    POST /sessions/{id}/advance     {"to_k": n} -> state snapshot
    GET  /sessions/{id}/export      -> report.json payload (finished sessions)

Bodies follow the scenario-file conventions ('HH:MM' times, watts).
Sessions live in memory; mutations on one session are serialized while
distinct sessions run fully in parallel.
"""

from __future__ import annotations

import json
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from homedr.billing import IntervalLoads, accumulate_bill
from homedr.core import SlRequest, ValidationError, deadline_interval, time_to_interval
from homedr.scenario_io import day_report_dict, parse_scenario
from homedr.simulator import Scenario, SimulationSession, _to_spans


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class LiveSession:
    def __init__(self, session_id: str, scenario: Scenario):
        self.id = session_id
        self.session = SimulationSession(scenario)
        self.lock = threading.Lock()

    def snapshot(self) -> dict:
        session = self.session
        scenario = session.scenario
        rows = session.rows
        timeline: dict[str, list[list[int]]] = {a.name: [] for a in scenario.appliances}
        forced: dict[str, list[list[int]]] = {}
        for spec in scenario.appliances:
            on = [r.k for r in rows if r.statuses.get(spec.name, False)]
            timeline[spec.name] = [list(span) for span in _to_spans(on)]
            forced_on = [r.k for r in rows if spec.name in r.forced]
            if forced_on:
                forced[spec.name] = [list(span) for span in _to_spans(forced_on)]
        bill = accumulate_bill(
            (
                IntervalLoads(
                    k=r.k,
                    price=r.price,
                    pil_kw=r.pil_kw,
                    loads_kw={n: scenario.spec(n).rating_kw for n, on in r.statuses.items() if on},
                )
                for r in rows
            ),
            schedulable=scenario.schedulable_names,
        )
        return {
            "id": self.id,
            "status": "finished" if session.finished else "active",
            "current_k": session.current_k,
            "scenario": {"name": scenario.name, "currency_label": scenario.currency_label},
            "appliances": [
                {"name": a.name, "category": a.category.value, "rating_kw": a.rating_kw}
                for a in scenario.appliances
            ],
            "tariff_hourly": list(scenario.tariff.hourly),
            "pil_hourly": list(scenario.pil.hourly),
            "intervals": [
                {
                    "k": r.k,
                    "time": r.time,
                    "total_kw": round(r.total_kw, 4),
                    "pil_kw": round(r.pil_kw, 4),
                    "pil_eff_kw": round(r.pil_eff_kw, 4),
                    "price": round(r.price, 4),
                    "cost": round(r.bill.total_cost, 4),
                    "penalty": round(r.bill.penalty_cost, 4),
                    "excess_kwh": round(r.bill.excess_kwh, 4),
                    "room_c": round(r.room_c, 4) if r.room_c is not None else None,
                }
                for r in rows
            ],
            "timeline": timeline,
            "forced_spans": forced,
            "bill": {
                "total_cost": round(bill.total_cost, 4),
                "base_cost": round(bill.base_cost, 4),
                "penalty_total": round(bill.penalty_total, 4),
                "peak_kw": round(bill.peak_kw, 4),
                "per_load": {name: round(cost, 4) for name, cost in sorted(bill.per_load.items())},
            },
            "requests": session.request_metrics(),
        }


class SessionService:
    """In-memory session registry backing the HTTP handler."""

    def __init__(self):
        self._sessions: dict[str, LiveSession] = {}
        self._lock = threading.Lock()

    def create(self, document: dict, session_id: str | None = None) -> LiveSession:
        scenario = parse_scenario(document)
        live = LiveSession(session_id or uuid.uuid4().hex, scenario)
        with self._lock:
            self._sessions[live.id] = live
        return live

    def get(self, session_id: str) -> LiveSession:
        with self._lock:
            live = self._sessions.get(session_id)
        if live is None:
            raise ServiceError(404, f"unknown session {session_id!r}")
        return live

    def handle(self, method: str, path: str, body: dict | None) -> tuple[int, dict]:
        parts = [p for p in path.split("/") if p]
        if not parts or parts[0] != "sessions":
            raise ServiceError(404, f"no such resource: {path}")

        if method == "POST" and len(parts) == 1:
            if body is None:
                raise ServiceError(400, "scenario document required")
            try:
                live = self.create(body)
            except ValidationError as exc:
                return 422, {"error": str(exc), "field": exc.field}
            with live.lock:
                return 201, {"id": live.id, "state": live.snapshot()}

        if len(parts) < 2:
            raise ServiceError(404, f"no such resource: {path}")
        live = self.get(parts[1])
        action = parts[2] if len(parts) > 2 else None

        if method == "GET" and action is None:
            with live.lock:
                return 200, live.snapshot()

        if method == "GET" and action == "export":
            with live.lock:
                if not live.session.finished:
                    raise ServiceError(409, f"session at interval {live.session.current_k}; export needs 288")
                return 200, day_report_dict(live.session.result())

        if method == "POST" and action == "advance":
            if body is None or "to_k" not in body:
                raise ServiceError(400, "body must carry 'to_k'")
            to_k = body["to_k"]
            if not isinstance(to_k, int) or isinstance(to_k, bool):
                raise ServiceError(400, f"'to_k' must be an integer, got {to_k!r}")
            with live.lock:
                try:
                    live.session.advance_to(to_k)
                except ValidationError as exc:
                    raise ServiceError(409, str(exc)) from None
                return 200, live.snapshot()

        if method == "POST" and action == "requests":
            if body is None:
                raise ServiceError(400, "request body required")
            with live.lock:
                accepted, reason = self._submit(live.session, body)
                return 200, {"accepted": accepted, "reason": reason, "state": live.snapshot()}

        raise ServiceError(404, f"no such resource: {method} {path}")

    @staticmethod
    def _submit(session: SimulationSession, body: dict) -> tuple[bool, str]:
        try:
            appliance = body["appliance"]
            request = SlRequest(
                appliance=appliance,
                s=time_to_interval(str(body["s"]), "s"),
                f=deadline_interval(str(body["f"]), "f"),
                r_min=int(body["r_min"]),
                submit_k=session.current_k,
            )
        except KeyError as exc:
            return False, f"missing field {exc.args[0]!r}"
        except (ValidationError, TypeError, ValueError) as exc:
            return False, str(exc)
        try:
            session.submit(request)
        except (ValidationError, KeyError) as exc:
            return False, str(exc)
        return True, "accepted"


class _Handler(BaseHTTPRequestHandler):
    service: SessionService  # assigned by make_server
    protocol_version = "HTTP/1.1"

    def log_message(self, format, *args):  # quiet by default
        pass

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _dispatch(self, method: str) -> None:
        body = None
        length = int(self.headers.get("Content-Length") or 0)
        if length:
            try:
                body = json.loads(self.rfile.read(length).decode("utf-8"))
            except json.JSONDecodeError as exc:
                self._reply(400, {"error": f"request body is not valid JSON: {exc}"})
                return
        try:
            status, payload = self.service.handle(method, self.path.split("?")[0], body)
        except ServiceError as exc:
            self._reply(exc.status, {"error": str(exc)})
        except ValidationError as exc:
            self._reply(422, {"error": str(exc), "field": exc.field})
        else:
            self._reply(status, payload)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Content-Length", "0")
        self.end_headers()


def make_server(port: int, service: SessionService | None = None) -> ThreadingHTTPServer:
    service = service or SessionService()
    handler = type("SessionHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.service = service  # type: ignore[attr-defined]
    return server


def serve(port: int, scenario_document: dict | None = None) -> None:
    """Run the session service until interrupted.

    With a scenario document, a ready-made session with id 'default' is
    created at startup so clients can attach immediately.
    """
    service = SessionService()
    if scenario_document is not None:
        service.create(scenario_document, session_id="default")
    server = make_server(port, service)
    host, bound_port = server.server_address[:2]
    print(f"session service listening on http://{host}:{bound_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
