"""Command-line front end.

Exit codes: 0 certified or budget-limited run with a path, 1 infeasible or no
path found, 2 bad flags, 3 unreadable or invalid scenario, 4 solver could not
be started, 5 solver misbehaved.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .engine import OracleError, OptimizationResult, RunStatus, optimize
from .exact import RootSum
from .oracle import BackendSpec, SolverSpawnError
from .output import CSV_HEADER, emit_svg, trace_row
from .scenario import BUILTIN_SCENARIOS, ConfigError, EngineConfig, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_NO_PATH = 1
EXIT_USAGE = 2
EXIT_SCENARIO = 3
EXIT_SPAWN = 4
EXIT_BACKEND = 5


@dataclass
class RunReport:
    status: str
    cost: Optional[RootSum]
    path: Optional[list]
    calls: int
    sat: int
    unsat: int
    timeout: int
    wall_s: float
    backend: str

    @classmethod
    def from_result(cls, result: OptimizationResult, backend: str) -> "RunReport":
        counts = result.counts()
        return cls(
            status=result.status.value,
            cost=result.cost,
            path=result.path,
            calls=len(result.trace),
            sat=counts["SAT"],
            unsat=counts["UNSAT"],
            timeout=counts["TIMEOUT"],
            wall_s=result.elapsed_s,
            backend=backend,
        )

    def summary(self) -> str:
        lines = [f"status: {self.status}"]
        if self.cost is not None:
            lines.append(f"cost: {self.cost.quantize(6)} m  ({self.cost!r})")
            pts = " -> ".join(f"({float(p.x):g}, {float(p.y):g})" for p in self.path)
            lines.append(f"path ({len(self.path) - 2} waypoints): {pts}")
        lines.append(f"oracle calls: {self.calls} (sat {self.sat}, unsat {self.unsat}, timeout {self.timeout})")
        lines.append(f"backend: {self.backend}")
        lines.append(f"wall time: {self.wall_s:.2f} s")
        return "\n".join(lines)


def _positive_decimal(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def _positive_float(text: str) -> float:
    return float(_positive_decimal(text))


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return value


def _bound(text: str):
    if text == "perimeter":
        return text
    return _positive_decimal(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cegio", description="Counterexample-guided optimal path planning.")
    ap.add_argument("--scenario", required=True,
                    help=f"built-in name ({', '.join(BUILTIN_SCENARIOS)}) or path to a scenario file")
    ap.add_argument("--backend", choices=("builtin", "smtlib"), default="builtin")
    ap.add_argument("--solver-cmd", help="external solver command (default: $CEGIO_SOLVER_CMD)")
    ap.add_argument("--step", type=_positive_decimal, default=Fraction(1, 100),
                    help="minimum cost improvement per accepted counterexample, meters (default 0.01)")
    ap.add_argument("--precision", type=_non_negative_int, default=1,
                    help="final number of decimal places of the waypoint coordinates (default 1)")
    ap.add_argument("--initial-points", type=_positive_int, default=1)
    ap.add_argument("--max-points", type=_positive_int, default=2, help="maximum number of free waypoints")
    ap.add_argument("--unsat-limit", type=_positive_int, default=2,
                    help="consecutive UNSAT answers before refining the precision")
    ap.add_argument("--timeout", type=_positive_float, default=60.0, help="per-query timeout, seconds")
    ap.add_argument("--budget", type=_positive_float, help="total wall-clock budget, seconds")
    ap.add_argument("--max-calls", type=_positive_int, help="total oracle-call budget")
    ap.add_argument("--bound", type=_bound, default="perimeter",
                    help="initial cost bound: 'perimeter' or a value in meters")
    ap.add_argument("--full-domain", action="store_true",
                    help="do not contract the search box after refining the precision")
    ap.add_argument("--trace-csv", type=Path)
    ap.add_argument("--timings", action="store_true", help="write wall-clock times into the trace CSV")
    ap.add_argument("--svg-out", type=Path)
    ap.add_argument("--svg-scale", type=_positive_float, default=50.0, help="SVG user units per meter")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def resolve_scenario(name: str):
    if name in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[name]
    try:
        text = Path(name).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {name}: {exc.strerror}") from None
    return load_scenario(text)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")

    try:
        config = EngineConfig(
            eta=args.precision,
            step=args.step,
            initial_waypoints=args.initial_points,
            max_waypoints=max(args.max_points, args.initial_points),
            consecutive_unsat_limit=args.unsat_limit,
            oracle_timeout=args.timeout,
            budget_seconds=args.budget,
            max_calls=args.max_calls,
            initial_bound=args.bound,
            full_domain=args.full_domain,
        )
        if args.backend == "smtlib":
            backend = BackendSpec.external(args.solver_cmd or os.environ.get("CEGIO_SOLVER_CMD"), args.timeout)
        else:
            backend = BackendSpec("builtin", timeout=args.timeout)
    except (ConfigError, ValueError) as exc:
        parser.error(str(exc))

    try:
        scenario = resolve_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"cegio: scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO

    csv_file = None
    if args.trace_csv is not None:
        csv_file = open(args.trace_csv, "w", encoding="utf-8", newline="")
        csv_file.write(",".join(CSV_HEADER) + "\n")

    def stream(rec):
        if csv_file is not None:
            csv_file.write(trace_row(rec, args.timings))
            csv_file.flush()

    try:
        result = optimize(scenario, config, backend, on_record=stream)
    except ConfigError as exc:
        parser.error(str(exc))
    except SolverSpawnError as exc:
        print(f"cegio: {exc}", file=sys.stderr)
        return EXIT_SPAWN
    except OracleError as exc:
        print(f"cegio: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    finally:
        if csv_file is not None:
            csv_file.close()

    if args.svg_out is not None:
        args.svg_out.write_text(emit_svg(scenario, result.path, scale=args.svg_scale), encoding="utf-8")

    report = RunReport.from_result(result, backend.describe())
    print(report.summary())
    if result.status is RunStatus.INFEASIBLE or result.path is None:
        return EXIT_NO_PATH
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
