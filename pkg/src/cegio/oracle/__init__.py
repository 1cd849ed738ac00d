"""Satisfiability oracles deciding "a feasible path cheaper than J_c exists"."""

from __future__ import annotations

import enum
import os
import shlex
from dataclasses import dataclass
from typing import Optional

from ..encoder import OracleQuery
from ..exact import RootSum
from ..geometry import path_cost, path_feasible
from ..scenario import GridPath, grid_path_to_real


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"
    BACKEND_ERROR = "BACKEND_ERROR"


@dataclass(frozen=True)
class OracleVerdict:
    status: Status
    model: Optional[GridPath] = None
    cost: Optional[RootSum] = None
    detail: str = ""

    @classmethod
    def sat(cls, model: GridPath, cost: RootSum) -> "OracleVerdict":
        return cls(Status.SAT, model, cost)

    @classmethod
    def error(cls, detail: str) -> "OracleVerdict":
        return cls(Status.BACKEND_ERROR, detail=detail)


UNSAT = OracleVerdict(Status.UNSAT)
TIMEOUT = OracleVerdict(Status.TIMEOUT)


class SolverSpawnError(RuntimeError):
    """The external solver process could not be started."""


@dataclass(frozen=True)
class BackendSpec:
    kind: str = "builtin"
    command: tuple[str, ...] = ()
    timeout: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("builtin", "smtlib"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if isinstance(self.command, str):
            object.__setattr__(self, "command", tuple(shlex.split(self.command)))
        if self.kind == "smtlib" and not self.command:
            raise ValueError("smtlib backend needs a solver command")

    @classmethod
    def external(cls, command=None, timeout=None) -> "BackendSpec":
        command = command or os.environ.get("CEGIO_SOLVER_CMD")
        if not command:
            raise ValueError("no solver command: pass one or set CEGIO_SOLVER_CMD")
        return cls("smtlib", command, timeout)

    def describe(self) -> str:
        if self.kind == "builtin":
            return "builtin"
        return "smtlib:" + shlex.join(self.command)


def verify_model(query: OracleQuery, model: GridPath) -> Optional[RootSum]:
    """Exact cost of ``model`` if it really satisfies ``query``, else None."""
    if model.precision != query.precision or not query.box.contains(model):
        return None
    path = grid_path_to_real(model, query.scenario)
    if not path_feasible(path, query.scenario):
        return None
    cost = path_cost(path)
    if not cost < query.j_c:
        return None
    return cost


def check(query: OracleQuery, backend: BackendSpec) -> OracleVerdict:
    if backend.kind == "builtin":
        from .builtin import builtin_decide

        verdict = builtin_decide(query, timeout=backend.timeout)
    else:
        from .smtlib import smtlib_decide

        verdict = smtlib_decide(query, backend.command, timeout=backend.timeout)
    if verdict.status is not Status.SAT:
        return verdict
    # counterexample cost is recomputed exactly, never trusted from the backend
    cost = verify_model(query, verdict.model)
    if cost is None:
        return OracleVerdict.error(f"model {verdict.model.waypoints} fails re-verification")
    return OracleVerdict.sat(verdict.model, cost)
