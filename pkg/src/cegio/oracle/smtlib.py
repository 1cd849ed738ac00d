"""SMT-LIB 2 emission and a one-process-per-query solver driver.

The solver receives the script on stdin and must answer ``sat``, ``unsat`` or
``unknown`` on the first output line, followed by the model for ``sat``.
"""

from __future__ import annotations

import re
import subprocess
from typing import Optional, Sequence

from ..encoder import Atom, OracleQuery, Poly, var_name
from ..scenario import GridPath
from . import TIMEOUT, UNSAT, OracleVerdict, SolverSpawnError

LOGIC = "QF_NIRA"


class ModelParseError(ValueError):
    pass


def _int(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def _real(n: int) -> str:
    return f"{n}.0" if n >= 0 else f"(- {-n}.0)"


def _term(poly: Poly) -> str:
    parts = []
    for mono, c in poly.ordered_terms():
        if not mono:
            parts.append(_int(c))
        elif c == 1:
            parts.append(mono[0] if len(mono) == 1 else f"(* {' '.join(mono)})")
        else:
            parts.append(f"(* {_int(c)} {' '.join(mono)})")
    if not parts:
        return "0"
    if len(parts) == 1:
        return parts[0]
    return f"(+ {' '.join(parts)})"


def _atom(atom: Atom) -> str:
    return f"({atom.rel} {_term(atom.poly)} 0)"


def smtlib_emit(query: OracleQuery) -> str:
    out = [
        f"; cegio query: precision={query.precision} waypoints={query.waypoints} scale={query.scale}",
        "(set-option :produce-models true)",
        f"(set-logic {LOGIC})",
    ]
    for v in query.variables:
        out.append(f"(declare-fun {v.name} () Int)")
    for v in query.variables:
        out.append(f"(assert (and (<= {_int(v.lo)} {v.name}) (<= {v.name} {_int(v.hi)})))")
    for g in query.clearance:
        out.append(f"; segment {g.segment} vs obstacle {g.obstacle}")
        for clause in g.clauses:
            body = _atom(clause[0]) if len(clause) == 1 else f"(or {' '.join(map(_atom, clause))})"
            out.append(f"(assert {body})")
    for d in query.distances:
        out.append(f"(declare-fun {d.name} () Real)")
        out.append(f"(assert (>= {d.name} 0.0))")
        out.append(f"(assert (= (* {d.name} {d.name}) (to_real {_term(d.squared)})))")
        out.append(f"(assert (<= {d.name} {_real(d.upper)}))")
        for delta in (d.dx, d.dy):
            out.append(f"(assert (>= {d.name} (to_real {_term(delta)})))")
            out.append(f"(assert (>= {d.name} (to_real {_term(-delta)})))")
        for sx in (1, -1):
            for sy in (1, -1):
                out.append(f"(assert (>= (* 10.0 {d.name}) (to_real (* 7 {_term(d.dx * sx + d.dy * sy)}))))")
    cb = query.cost
    for name, radicand, _ in cb.roots:
        out.append(f"(declare-fun {name} () Real)")
        out.append(f"(assert (>= {name} 0.0))")
        out.append(f"(assert (= (* {name} {name}) {_real(radicand)}))")
    names = [d.name for d in query.distances]
    total = names[0] if len(names) == 1 else f"(+ {' '.join(names)})"
    lhs = total if cb.multiplier == 1 else f"(* {_real(cb.multiplier)} {total})"
    rhs_parts = [_real(cb.constant)] + [f"(* {_real(c)} {name})" for name, _, c in cb.roots]
    rhs = rhs_parts[0] if len(rhs_parts) == 1 else f"(+ {' '.join(rhs_parts)})"
    out.append(f"(assert (< {lhs} {rhs}))")
    out.append("(check-sat)")
    out.append("(get-model)")
    out.append("(exit)")
    return "\n".join(out) + "\n"


_TOKEN = re.compile(r"\(|\)|\"(?:[^\"]|\"\")*\"|\|[^|]*\||[^\s()]+")


def parse_sexprs(text: str) -> list:
    stack: list[list] = [[]]
    for tok in _TOKEN.findall(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ModelParseError(f"unbalanced ')' in {text[:80]!r}")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ModelParseError(f"unbalanced '(' in {text[:80]!r}")
    return stack[0]


def _value(expr) -> int:
    if isinstance(expr, str):
        if re.fullmatch(r"\d+", expr):
            return int(expr)
        raise ModelParseError(f"not an integer numeral: {expr}")
    if len(expr) == 2 and expr[0] == "-":
        return -_value(expr[1])
    raise ModelParseError(f"not an integer value: {expr}")


def smtlib_parse_model(text: str, precision: int = 1, waypoints: Optional[int] = None) -> GridPath:
    """Extract coordinate bindings ``x_i_j`` from a get-model response.

    A leading ``sat`` line is accepted and skipped.
    """
    body = text.lstrip()
    first, _, rest = body.partition("\n")
    if first.strip() == "sat":
        body = rest
    elif first.strip() in ("unsat", "unknown"):
        raise ModelParseError(f"no model in a {first.strip()!r} response")
    values: dict[str, int] = {}

    def walk(node):
        if not isinstance(node, list):
            return
        if node and node[0] == "define-fun" and len(node) == 5:
            name, args, sort, val = node[1:]
            if re.fullmatch(r"x_\d+_[01]", name):
                if args != [] or sort != "Int":
                    raise ModelParseError(f"unexpected binding for {name}: {node}")
                values[name] = _value(val)
            return
        if node and node[0] == "error":
            raise ModelParseError(f"solver error: {' '.join(map(str, node[1:]))}")
        for child in node:
            walk(child)

    walk(parse_sexprs(body))
    if waypoints is None:
        waypoints = len({n.split("_")[1] for n in values})
    if waypoints == 0:
        raise ModelParseError(f"no coordinate bindings in {text[:80]!r}")
    pts = []
    for i in range(waypoints):
        try:
            pts.append((values[var_name(i, 0)], values[var_name(i, 1)]))
        except KeyError as exc:
            raise ModelParseError(f"missing symbol {exc.args[0]}") from None
    return GridPath(precision, tuple(pts))


def smtlib_decide(query: OracleQuery, command: Sequence[str], timeout: Optional[float] = None) -> OracleVerdict:
    script = smtlib_emit(query)
    try:
        proc = subprocess.run(
            list(command),
            input=script,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired:
        return TIMEOUT
    except OSError as exc:
        raise SolverSpawnError(f"cannot run {command[0]!r}: {exc}") from exc
    answer, _, rest = proc.stdout.lstrip().partition("\n")
    answer = answer.strip()
    if answer == "unsat":
        return UNSAT
    if answer in ("unknown", "timeout"):
        return TIMEOUT
    if answer != "sat":
        detail = (proc.stdout.strip() or proc.stderr.strip())[:200]
        return OracleVerdict.error(f"unexpected solver output (exit {proc.returncode}): {detail!r}")
    try:
        model = smtlib_parse_model(rest, query.precision, query.waypoints)
    except ModelParseError as exc:
        return OracleVerdict.error(str(exc))
    # oracle.check recomputes the cost and re-verifies the model
    return OracleVerdict.sat(model, None)
