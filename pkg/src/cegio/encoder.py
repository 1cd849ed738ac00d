"""Translate "is there a feasible path cheaper than J_c?" into integer polynomial constraints.

All coordinates are expressed in units of ``1 / (p * scale)`` meters, where
``scale`` is the least common denominator that makes the start, target,
obstacle centers and inflated radii integral at precision ``p``. Waypoint
variables stay on the ``1/p`` grid; their scaled value is ``scale * x``.

Segment/obstacle clearance for a segment ``a -> b`` and center ``c`` with
``u = c - a``, ``w = b - a`` and inflated radius ``R`` is the conjunction of

* ``|a - c|^2 >= R^2`` and ``|b - c|^2 >= R^2`` (endpoints), and
* ``u.w < 0  or  u.w > w.w  or  (u.u)(w.w) - (u.w)^2 >= R^2 (w.w)``

which is the division-free form of "the perpendicular foot, when it falls
inside the segment, is at least R away".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .exact import RootSum, as_rational
from .geometry import RealPoint
from .scenario import GridPath, Scenario, is_power_of_ten

Monomial = tuple[str, ...]


class Poly:
    """Polynomial with integer coefficients over named variables."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, int]] = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str, coeff: int = 1) -> "Poly":
        return cls({(name,): coeff})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly({m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def variables(self) -> set[str]:
        return {v for m in self.terms for v in m}

    def ordered_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = 0
        for m, c in self.terms.items():
            term = c
            for v in m:
                term *= env[v]
            total += term
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{'*'.join(m)}" if m else str(c) for m, c in self.ordered_terms())


RELATIONS = {
    ">=": lambda v: v >= 0,
    ">": lambda v: v > 0,
    "<": lambda v: v < 0,
    "<=": lambda v: v <= 0,
    "=": lambda v: v == 0,
}


@dataclass(frozen=True)
class Atom:
    """``poly <rel> 0``."""

    poly: Poly
    rel: str

    def holds(self, env: Mapping[str, int]) -> bool:
        return RELATIONS[self.rel](self.poly.evaluate(env))


@dataclass(frozen=True)
class ClearanceGroup:
    segment: int
    obstacle: int
    clauses: tuple[tuple[Atom, ...], ...]  # conjunction of disjunctions

    def holds(self, env: Mapping[str, int]) -> bool:
        return all(any(a.holds(env) for a in clause) for clause in self.clauses)


@dataclass(frozen=True)
class IntVar:
    name: str
    lo: int
    hi: int


@dataclass(frozen=True)
class Distance:
    """Real symbol ``name >= 0`` with ``name^2 == dx^2 + dy^2``.

    ``upper`` bounds the distance over the domain box. Together with
    ``name >= |dx|``, ``name >= |dy|`` and ``10*name >= 7*(|dx| + |dy|)`` it
    gives solvers linear cuts that the quadratic definition already implies.
    """

    name: str
    dx: Poly
    dy: Poly
    upper: int

    @property
    def squared(self) -> Poly:
        return _sq(self.dx) + _sq(self.dy)


@dataclass(frozen=True)
class CostBound:
    """``multiplier * sum(d_i) < constant + sum(coeff * root)`` with ``root^2 == radicand``."""

    multiplier: int
    constant: int
    roots: tuple[tuple[str, int, int], ...]  # (name, radicand, coeff)


@dataclass(frozen=True)
class DomainBox:
    """Per-waypoint integer intervals ``((x_lo, x_hi), (y_lo, y_hi))`` at one precision.

    An interval with ``lo > hi`` is empty and makes the whole box empty.
    """

    intervals: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    @classmethod
    def full(cls, scenario: Scenario, p: int, m: int) -> "DomainBox":
        return cls((scenario.bounds.grid_range(p),) * m)

    @property
    def waypoints(self) -> int:
        return len(self.intervals)

    @property
    def empty(self) -> bool:
        return any(lo > hi for iv in self.intervals for lo, hi in iv)

    def size(self) -> int:
        n = 1
        for iv in self.intervals:
            for lo, hi in iv:
                n *= max(0, hi - lo + 1)
        return n

    def contains(self, gp: GridPath) -> bool:
        if len(gp.waypoints) != len(self.intervals):
            return False
        return all(
            xr[0] <= x <= xr[1] and yr[0] <= y <= yr[1]
            for (x, y), (xr, yr) in zip(gp.waypoints, self.intervals)
        )

    def within(self, scenario: Scenario, p: int) -> bool:
        (gx_lo, gx_hi), (gy_lo, gy_hi) = scenario.bounds.grid_range(p)
        for (x_lo, x_hi), (y_lo, y_hi) in self.intervals:
            if x_lo <= x_hi and not (gx_lo <= x_lo and x_hi <= gx_hi):
                return False
            if y_lo <= y_hi and not (gy_lo <= y_lo and y_hi <= gy_hi):
                return False
        return True


def var_name(i: int, j: int) -> str:
    return f"x_{i}_{j}"


@dataclass(frozen=True)
class OracleQuery:
    scenario: Scenario
    precision: int
    box: DomainBox
    j_c: RootSum  # meters
    scale: int
    variables: tuple[IntVar, ...]
    clearance: tuple[ClearanceGroup, ...]
    distances: tuple[Distance, ...]
    cost: CostBound

    @property
    def waypoints(self) -> int:
        return self.box.waypoints

    def assignment(self, gp: GridPath) -> dict[str, int]:
        return {var_name(i, j): c for i, pt in enumerate(gp.waypoints) for j, c in enumerate(pt)}

    def decode(self, env: Mapping[str, int]) -> GridPath:
        pts = tuple((env[var_name(i, 0)], env[var_name(i, 1)]) for i in range(self.waypoints))
        return GridPath(self.precision, pts)

    def holds(self, env: Mapping[str, int]) -> bool:
        """Evaluate every constraint exactly for an integer assignment."""
        for v in self.variables:
            if not v.lo <= env[v.name] <= v.hi:
                return False
        if not all(g.holds(env) for g in self.clearance):
            return False
        total = RootSum()
        for d in self.distances:
            total = total + RootSum.sqrt(d.squared.evaluate(env))
        bound = RootSum(self.cost.constant, [(s, Fraction(c)) for _, s, c in self.cost.roots])
        return total * self.cost.multiplier < bound


def _lcm_denominators(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, as_rational(v).denominator)
    return out


def _sq(p: Poly) -> Poly:
    return p * p


def clearance_group(a: tuple[Poly, Poly], b: tuple[Poly, Poly], c: tuple[int, int], r2: int,
                    segment: int = 0, obstacle: int = 0) -> ClearanceGroup:
    cx, cy = Poly.const(c[0]), Poly.const(c[1])
    ux, uy = cx - a[0], cy - a[1]
    wx, wy = b[0] - a[0], b[1] - a[1]
    uu = _sq(ux) + _sq(uy)
    ww = _sq(wx) + _sq(wy)
    uw = ux * wx + uy * wy
    bc = _sq(b[0] - cx) + _sq(b[1] - cy)
    r2p = Poly.const(r2)
    clauses = (
        (Atom(uu - r2p, ">="),),
        (Atom(bc - r2p, ">="),),
        (
            Atom(uw, "<"),
            Atom(uw - ww, ">"),
            Atom(uu * ww - uw * uw - ww * r2, ">="),
        ),
    )
    return ClearanceGroup(segment, obstacle, clauses)


def encode(scenario: Scenario, p: int, m: int, box: DomainBox, j_c) -> OracleQuery:
    if not is_power_of_ten(p):
        raise ValueError(f"precision {p} is not a power of ten")
    j_c = RootSum.coerce(j_c)
    if j_c.sign() <= 0:
        raise ValueError("cost bound must be positive")
    if box.waypoints != m:
        raise ValueError(f"box has {box.waypoints} waypoints, expected {m}")
    if not box.within(scenario, p):
        raise ValueError("domain box lies outside the environment")

    reaches = [o.radius + scenario.sigma for o in scenario.obstacles]
    consts = [scenario.start.x, scenario.start.y, scenario.target.x, scenario.target.y, *reaches]
    for o in scenario.obstacles:
        consts += [o.center.x, o.center.y]
    scale = _lcm_denominators(v * p for v in consts)
    unit = p * scale

    def const_point(pt: RealPoint) -> tuple[Poly, Poly]:
        return Poly.const(int(pt.x * unit)), Poly.const(int(pt.y * unit))

    variables = []
    vertices = [const_point(scenario.start)]
    for i, iv in enumerate(box.intervals):
        for j, (lo, hi) in enumerate(iv):
            variables.append(IntVar(var_name(i, j), lo, hi))
        vertices.append((Poly.var(var_name(i, 0), scale), Poly.var(var_name(i, 1), scale)))
    vertices.append(const_point(scenario.target))

    ranges = [((int(scenario.start.x * unit),) * 2, (int(scenario.start.y * unit),) * 2)]
    ranges += [((xl * scale, xh * scale), (yl * scale, yh * scale)) for (xl, xh), (yl, yh) in box.intervals]
    ranges.append(((int(scenario.target.x * unit),) * 2, (int(scenario.target.y * unit),) * 2))

    clearance = []
    distances = []
    for s, (a, b) in enumerate(zip(vertices, vertices[1:])):
        for k, obs in enumerate(scenario.obstacles):
            c = (int(obs.center.x * unit), int(obs.center.y * unit))
            r2 = int(reaches[k] * unit) ** 2
            clearance.append(clearance_group(a, b, c, r2, s, k))
        reach = [max(abs(rb[1] - ra[0]), abs(rb[0] - ra[1])) for ra, rb in zip(ranges[s], ranges[s + 1])]
        upper = math.isqrt(reach[0] ** 2 + reach[1] ** 2) + 1
        distances.append(Distance(f"d_{s}", b[0] - a[0], b[1] - a[1], upper))

    scaled = j_c * unit
    mult = _lcm_denominators([scaled.rational] + [q for _, q in scaled.roots])
    roots = tuple((f"root_{s}", s, int(q * mult)) for s, q in scaled.roots)
    cost = CostBound(mult, int(scaled.rational * mult), roots)

    return OracleQuery(
        scenario=scenario,
        precision=p,
        box=box,
        j_c=j_c,
        scale=scale,
        variables=tuple(variables),
        clearance=tuple(clearance),
        distances=tuple(distances),
        cost=cost,
    )
