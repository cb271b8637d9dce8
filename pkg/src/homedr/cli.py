"""Command-line entry point.

    homedr run --scenario day.json --mode scheduled --out results/
    homedr compare --scenario day.json --out results/
    homedr validate --scenario day.json
    homedr serve --port 8787 [--scenario day.json]

Exit codes: 0 success, 1 validation/usage error, 2 I/O error.  Output depends
only on the flags and file contents.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from homedr.core import ValidationError
from homedr.scenario_io import export_results, load_scenario
from homedr.simulator import compare, run_baseline, run_scheduled


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="homedr", description="Household demand-response scheduling simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one day in one mode and write artifacts")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--mode", required=True, choices=("baseline", "scheduled"))
    run.add_argument("--out", required=True, help="output directory")

    cmp_cmd = sub.add_parser("compare", help="run both modes and write paired artifacts plus a comparison")
    cmp_cmd.add_argument("--scenario", required=True)
    cmp_cmd.add_argument("--out", required=True)

    validate = sub.add_parser("validate", help="parse and validate a scenario file")
    validate.add_argument("--scenario", required=True)

    serve = sub.add_parser("serve", help="start the live session service")
    serve.add_argument("--port", type=int, required=True)
    serve.add_argument("--scenario", help="optionally pre-create a session with id 'default'")
    return parser


def dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1

    try:
        if args.command == "validate":
            scenario = load_scenario(args.scenario)
            print(
                f"ok: scenario '{scenario.name}' with {len(scenario.appliances)} appliances, "
                f"{len(scenario.requests)} requests"
            )
            return 0

        if args.command == "run":
            scenario = load_scenario(args.scenario)
            day = run_baseline(scenario) if args.mode == "baseline" else run_scheduled(scenario)
            export_results(day, scenario, args.out)
            print(
                f"mode={day.mode} total_cost={day.report.total_cost:.4f} "
                f"penalty_total={day.report.penalty_total:.4f} peak_kw={day.report.peak_kw:.4f}"
            )
            return 0

        if args.command == "compare":
            scenario = load_scenario(args.scenario)
            result = compare(scenario)
            export_results(result.scheduled, scenario, args.out, comparison=result)
            print(
                f"baseline_cost={result.baseline.report.total_cost:.4f} "
                f"scheduled_cost={result.scheduled.report.total_cost:.4f} "
                f"savings_pct={result.savings_pct:.2f} peak_reduction_pct={result.peak_reduction_pct:.2f}"
            )
            return 0

        if args.command == "serve":
            from homedr.service import serve as run_service

            document = None
            if args.scenario:
                document = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
            run_service(args.port, document)
            return 0
    except ValidationError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
