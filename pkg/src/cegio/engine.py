"""Counterexample-guided optimization loop.

For each precision ``p = 10**k`` (``k = 0..eta``) the engine asks the oracle
for a feasible path cheaper than ``J_c = J* - step``. A counterexample becomes
the new incumbent; an UNSAT answer adds a waypoint, and enough consecutive
UNSAT answers move on to the next precision with the incumbent rescaled and
the domain contracted around it.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Optional

from .encoder import DomainBox, encode
from .exact import RootSum
from .geometry import RealPoint, dot, path_cost, path_feasible
from .oracle import BackendSpec, OracleVerdict, Status, check
from .scenario import ConfigError, EngineConfig, Scenario, grid_path_to_real

log = logging.getLogger(__name__)

JC_PLACES = 10


class RunStatus(enum.Enum):
    OPTIMAL_AT_PRECISION = "OPTIMAL_AT_PRECISION"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"
    INFEASIBLE = "INFEASIBLE"


class OracleError(RuntimeError):
    """The oracle answered BACKEND_ERROR."""


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    precision: int
    waypoints: int
    j_c: Decimal
    verdict: str
    elapsed_s: Optional[float]
    bound: Optional[RootSum] = field(default=None, compare=False)
    cost: Optional[RootSum] = field(default=None, compare=False)
    path: Optional[tuple[RealPoint, ...]] = field(default=None, compare=False)


@dataclass
class OptimizationResult:
    status: RunStatus
    path: Optional[list[RealPoint]]
    cost: Optional[RootSum]
    trace: list[TraceRecord]
    precision: int
    waypoints: int
    elapsed_s: float

    def counts(self) -> dict[str, int]:
        out = {s.value: 0 for s in Status}
        for r in self.trace:
            out[r.verdict] += 1
        return out


def initial_bound(scenario: Scenario, config: EngineConfig) -> Fraction:
    if config.initial_bound == "perimeter":
        b = scenario.bounds
        return 2 * (b.width + b.height)
    value = Fraction(config.initial_bound)
    if not value > scenario.straight_line():
        raise ConfigError(f"initial bound {value} does not exceed the straight-line distance")
    return value


def longest_segment(path: list[RealPoint]) -> int:
    best, best_len = 0, Fraction(-1)
    for i, (a, b) in enumerate(zip(path, path[1:])):
        d = b - a
        if dot(d, d) > best_len:
            best, best_len = i, dot(d, d)
    return best


def cell_interval(value: Fraction, p: int, radius: int, full: tuple[int, int]) -> tuple[int, int]:
    lo = math.floor(value * p) - radius
    hi = math.ceil(value * p) + radius
    return max(lo, full[0]), min(hi, full[1])


def contracted_box(scenario: Scenario, path: list[RealPoint], p: int, radius: int) -> DomainBox:
    """Box of ``radius`` fine cells around every free waypoint, clipped to the environment."""
    xr, yr = scenario.bounds.grid_range(p)
    return DomainBox(tuple(
        (cell_interval(pt.x, p, radius, xr), cell_interval(pt.y, p, radius, yr)) for pt in path[1:-1]
    ))


class Optimizer:
    def __init__(self, scenario: Scenario, config: EngineConfig, backend: BackendSpec,
                 on_record: Optional[Callable[[TraceRecord], None]] = None,
                 clock: Callable[[], float] = time.monotonic):
        self.scenario = scenario
        self.config = config
        self.backend = backend
        self.on_record = on_record
        self.clock = clock
        finest = 10 ** config.eta
        for label, pt in (("start", scenario.start), ("target", scenario.target)):
            if (pt.x * finest).denominator != 1 or (pt.y * finest).denominator != 1:
                raise ConfigError(f"{label} {pt} is not on the 10^-{config.eta} m grid")
        self.j0 = initial_bound(scenario, config)

        self.k = 0
        self.p = 1
        self.m = config.initial_waypoints
        self.full_domain = True
        self.box = DomainBox.full(scenario, 1, self.m)
        self.best_path: Optional[list[RealPoint]] = None
        self.best_cost: Optional[RootSum] = None
        self.trace: list[TraceRecord] = []
        self.started = 0.0

    # -- budget ---------------------------------------------------------------

    def _out_of_budget(self) -> bool:
        cfg = self.config
        if cfg.max_calls is not None and len(self.trace) >= cfg.max_calls:
            return True
        if cfg.budget_seconds is not None and self.clock() - self.started >= cfg.budget_seconds:
            return True
        return False

    def _query_timeout(self) -> Optional[float]:
        cfg = self.config
        limits = [t for t in (cfg.oracle_timeout, self.backend.timeout) if t is not None]
        if cfg.budget_seconds is not None:
            limits.append(max(cfg.budget_seconds - (self.clock() - self.started), 1e-3))
        return min(limits) if limits else None

    # -- steps ----------------------------------------------------------------

    def _ask(self, j_c: RootSum) -> OracleVerdict:
        query = encode(self.scenario, self.p, self.m, self.box, j_c)
        backend = BackendSpec(self.backend.kind, self.backend.command, self._query_timeout())
        verdict = check(query, backend)
        snapshot = None
        if verdict.status is Status.SAT:
            snapshot = tuple(grid_path_to_real(verdict.model, self.scenario))
        rec = TraceRecord(
            iteration=len(self.trace) + 1,
            precision=self.p,
            waypoints=self.m,
            j_c=j_c.quantize(JC_PLACES),
            verdict=verdict.status.value,
            elapsed_s=round(self.clock() - self.started, 6),
            bound=j_c,
            cost=verdict.cost,
            path=snapshot,
        )
        self.trace.append(rec)
        log.debug("call %d p=%d m=%d J_c=%s -> %s", rec.iteration, self.p, self.m, rec.j_c, rec.verdict)
        if self.on_record is not None:
            self.on_record(rec)
        if verdict.status is Status.BACKEND_ERROR:
            raise OracleError(verdict.detail)
        return verdict

    def _accept(self, verdict: OracleVerdict) -> None:
        path = grid_path_to_real(verdict.model, self.scenario)
        cost = path_cost(path)
        if not path_feasible(path, self.scenario) or cost != verdict.cost:
            raise InvariantViolation(f"counterexample {verdict.model} is not a feasible path")
        if self.best_cost is not None and not cost <= self.best_cost - self.config.step:
            raise InvariantViolation("accepted cost did not improve by at least the step")
        self.best_path, self.best_cost = path, cost

    def _add_waypoint(self) -> None:
        self.m += 1
        if self.best_path is not None:
            # split the longest segment at its midpoint: same cost, same feasibility
            i = longest_segment(self.best_path)
            a, b = self.best_path[i], self.best_path[i + 1]
            mid = RealPoint((a.x + b.x) / 2, (a.y + b.y) / 2)
            self.best_path = self.best_path[: i + 1] + [mid] + self.best_path[i + 1:]
        if self.full_domain or self.best_path is None:
            self.box = DomainBox.full(self.scenario, self.p, self.m)
        else:
            self.box = contracted_box(self.scenario, self.best_path, self.p, self._radius())

    def _radius(self) -> int:
        return self.config.contraction_cells * 10

    def _refine(self) -> None:
        self.k += 1
        self.p *= 10
        if self.config.full_domain:
            self.box = DomainBox.full(self.scenario, self.p, self.m)
        else:
            self.full_domain = False
            self.box = contracted_box(self.scenario, self.best_path, self.p, self._radius())
        log.info("precision 10^-%d m, %d waypoints, box %s", self.k, self.m, self.box.intervals)

    def _result(self, status: RunStatus) -> OptimizationResult:
        return OptimizationResult(
            status=status,
            path=self.best_path,
            cost=self.best_cost,
            trace=self.trace,
            precision=self.p,
            waypoints=self.m,
            elapsed_s=self.clock() - self.started,
        )

    # -- main loop ------------------------------------------------------------

    def run(self) -> OptimizationResult:
        cfg = self.config
        self.started = self.clock()
        last = None
        while self.k <= cfg.eta:
            unsat_streak = 0
            while True:
                if self._out_of_budget():
                    return self._result(RunStatus.BUDGET_EXHAUSTED)
                if self.best_cost is None:
                    j_c = RootSum(self.j0)
                else:
                    j_c = self.best_cost - cfg.step
                    if j_c.sign() <= 0:
                        # start == target: nothing is cheaper than zero
                        last = Status.UNSAT
                        break
                verdict = self._ask(j_c)
                last = verdict.status
                if verdict.status is Status.SAT:
                    self._accept(verdict)
                    unsat_streak = 0
                    continue
                unsat_streak += 1
                if self.m >= cfg.max_waypoints:
                    break
                if self.best_cost is not None and unsat_streak >= cfg.consecutive_unsat_limit:
                    break
                self._add_waypoint()
            if self.best_cost is None:
                if any(r.verdict == Status.TIMEOUT.value for r in self.trace):
                    return self._result(RunStatus.BUDGET_EXHAUSTED)
                return self._result(RunStatus.INFEASIBLE)
            if self.k == cfg.eta:
                break
            self._refine()
        if last is Status.UNSAT:
            return self._result(RunStatus.OPTIMAL_AT_PRECISION)
        return self._result(RunStatus.BUDGET_EXHAUSTED)


def optimize(scenario: Scenario, config: EngineConfig, backend: Optional[BackendSpec] = None,
             on_record: Optional[Callable[[TraceRecord], None]] = None) -> OptimizationResult:
    backend = backend or BackendSpec()
    return Optimizer(scenario, config, backend, on_record).run()
