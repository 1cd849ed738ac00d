"""Environments, grid paths, engine configuration and scenario files.

A scenario file is a JSON object::

    {
      "format": 1,
      "bounds": [0, 10, 0, 10],
      "start": [1, 1],
      "target": [9, 9],
      "sigma": 0.5,
      "obstacles": [{"center": [5, 5], "radius": 2.5}]
    }

Numbers are decimal literals with at most six fractional digits; they are
read as exact rationals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exact import RootSum, as_rational
from .geometry import Circle, RealPoint, dot

FORMAT_VERSION = 1
MAX_FRACTION_DIGITS = 6


class ScenarioError(ValueError):
    """Malformed scenario text or a violated scenario invariant."""


class ConfigError(ValueError):
    pass


def is_power_of_ten(n: int) -> bool:
    if n < 1:
        return False
    while n % 10 == 0:
        n //= 10
    return n == 1


@dataclass(frozen=True)
class Bounds:
    x_min: Fraction
    x_max: Fraction
    y_min: Fraction
    y_max: Fraction

    @property
    def width(self) -> Fraction:
        return self.x_max - self.x_min

    @property
    def height(self) -> Fraction:
        return self.y_max - self.y_min

    def contains(self, pt: RealPoint) -> bool:
        return self.x_min <= pt.x <= self.x_max and self.y_min <= pt.y <= self.y_max

    def grid_range(self, p: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """Integer coordinate ranges at precision ``p``."""
        return (
            (math.ceil(self.x_min * p), math.floor(self.x_max * p)),
            (math.ceil(self.y_min * p), math.floor(self.y_max * p)),
        )


@dataclass(frozen=True)
class Scenario:
    bounds: Bounds
    obstacles: tuple[Circle, ...]
    sigma: Fraction
    start: RealPoint
    target: RealPoint

    def __post_init__(self):
        b = self.bounds
        if not (b.x_min < b.x_max and b.y_min < b.y_max):
            raise ScenarioError("empty bounds: need x_min < x_max and y_min < y_max")
        if self.sigma < 0:
            raise ScenarioError("negative sigma")
        for label, pt in (("start", self.start), ("target", self.target)):
            if not b.contains(pt):
                raise ScenarioError(f"{label} out of bounds: {pt}")
            for i, obs in enumerate(self.obstacles):
                d = pt - obs.center
                reach = obs.radius + self.sigma
                if dot(d, d) <= reach * reach:
                    raise ScenarioError(f"{label} inside inflated obstacle {i}")

    def straight_line(self) -> RootSum:
        d = self.target - self.start
        return RootSum.sqrt(dot(d, d))


@dataclass(frozen=True)
class GridPath:
    """Free waypoints on the integer grid at ``precision`` cells per meter."""

    precision: int
    waypoints: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple((int(x), int(y)) for x, y in self.waypoints))
        if not is_power_of_ten(self.precision):
            raise ValueError(f"precision {self.precision} is not a power of ten")
        if not self.waypoints:
            raise ValueError("a grid path needs at least one waypoint")

    def in_bounds(self, scenario: Scenario) -> bool:
        (x_lo, x_hi), (y_lo, y_hi) = scenario.bounds.grid_range(self.precision)
        return all(x_lo <= x <= x_hi and y_lo <= y <= y_hi for x, y in self.waypoints)


def grid_path_to_real(gp: GridPath, scenario: Scenario) -> list[RealPoint]:
    p = gp.precision
    inner = [RealPoint(Fraction(x, p), Fraction(y, p)) for x, y in gp.waypoints]
    return [scenario.start, *inner, scenario.target]


@dataclass(frozen=True)
class EngineConfig:
    eta: int = 1
    step: Fraction = Fraction(1, 100)
    initial_waypoints: int = 1
    max_waypoints: int = 2
    consecutive_unsat_limit: int = 2
    oracle_timeout: Optional[float] = 60.0
    budget_seconds: Optional[float] = None
    max_calls: Optional[int] = None
    initial_bound: Union[str, Fraction] = "perimeter"
    full_domain: bool = False
    contraction_cells: int = 2

    def __post_init__(self):
        object.__setattr__(self, "step", as_rational(self.step))
        if self.initial_bound != "perimeter":
            object.__setattr__(self, "initial_bound", as_rational(self.initial_bound))
        if self.step <= 0:
            raise ConfigError("step must be positive")
        if self.eta < 0:
            raise ConfigError("eta must be non-negative")
        if self.initial_waypoints < 1:
            raise ConfigError("initial_waypoints must be at least 1")
        if self.max_waypoints < self.initial_waypoints:
            raise ConfigError("max_waypoints must be >= initial_waypoints")
        if self.consecutive_unsat_limit < 1:
            raise ConfigError("consecutive_unsat_limit must be at least 1")
        if self.oracle_timeout is not None and self.oracle_timeout <= 0:
            raise ConfigError("oracle_timeout must be positive")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise ConfigError("budget_seconds must be positive")
        if self.max_calls is not None and self.max_calls < 1:
            raise ConfigError("max_calls must be at least 1")
        if self.contraction_cells < 0:
            raise ConfigError("contraction_cells must be non-negative")


# --- scenario files -----------------------------------------------------------

_FIELDS = ("format", "bounds", "start", "target", "sigma", "obstacles")


class _Literal(str):
    """A JSON number kept as its source text."""


def _number(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, _Literal)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    text = str(value)
    if "e" in text.lower():
        raise ScenarioError(f"{where}: exponent notation not allowed ({text})")
    if "." in text and len(text.split(".", 1)[1]) > MAX_FRACTION_DIGITS:
        raise ScenarioError(f"{where}: more than {MAX_FRACTION_DIGITS} fractional digits ({text})")
    return Fraction(text)


def _pair(value, where: str) -> RealPoint:
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioError(f"{where}: expected [x, y]")
    return RealPoint(_number(value[0], f"{where}[0]"), _number(value[1], f"{where}[1]"))


def load_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text, parse_float=_Literal, parse_int=_Literal)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    missing = [k for k in _FIELDS if k not in doc]
    if missing:
        raise ScenarioError(f"missing field(s): {', '.join(missing)}")
    unknown = sorted(set(doc) - set(_FIELDS))
    if unknown:
        raise ScenarioError(f"unknown field(s): {', '.join(unknown)}")
    if _number(doc["format"], "format") != FORMAT_VERSION:
        raise ScenarioError(f"format: unsupported version {doc['format']}")

    raw = doc["bounds"]
    if not isinstance(raw, list) or len(raw) != 4:
        raise ScenarioError("bounds: expected [x_min, x_max, y_min, y_max]")
    bounds = Bounds(*(_number(v, f"bounds[{i}]") for i, v in enumerate(raw)))

    if not isinstance(doc["obstacles"], list):
        raise ScenarioError("obstacles: expected a list")
    obstacles = []
    for i, item in enumerate(doc["obstacles"]):
        where = f"obstacles[{i}]"
        if not isinstance(item, dict) or set(item) != {"center", "radius"}:
            raise ScenarioError(f"{where}: expected {{center, radius}}")
        center = _pair(item["center"], f"{where}.center")
        radius = _number(item["radius"], f"{where}.radius")
        if radius <= 0:
            raise ScenarioError(f"{where}: non-positive radius {radius}")
        obstacles.append(Circle(center, radius))

    return Scenario(
        bounds=bounds,
        obstacles=tuple(obstacles),
        sigma=_number(doc["sigma"], "sigma"),
        start=_pair(doc["start"], "start"),
        target=_pair(doc["target"], "target"),
    )


def _literal(q: Fraction) -> str:
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    scale = 10**MAX_FRACTION_DIGITS
    if (q * scale).denominator != 1:
        raise ScenarioError(f"{q} is not a decimal with <= {MAX_FRACTION_DIGITS} places")
    sign = "-" if q < 0 else ""
    whole, frac = divmod(abs(q.numerator) * (scale // q.denominator), scale)
    return f"{sign}{whole}.{frac:06d}".rstrip("0")


def emit_scenario(s: Scenario) -> str:
    def pair(pt):
        return f"[{_literal(pt.x)}, {_literal(pt.y)}]"

    b = s.bounds
    obstacles = ",\n".join(
        f'    {{"center": {pair(o.center)}, "radius": {_literal(o.radius)}}}' for o in s.obstacles
    )
    lines = [
        "{",
        f'  "format": {FORMAT_VERSION},',
        f'  "bounds": [{", ".join(_literal(v) for v in (b.x_min, b.x_max, b.y_min, b.y_max))}],',
        f'  "start": {pair(s.start)},',
        f'  "target": {pair(s.target)},',
        f'  "sigma": {_literal(s.sigma)},',
        '  "obstacles": [' + ("\n" + obstacles + "\n  ]" if s.obstacles else "]"),
        "}",
    ]
    return "\n".join(lines) + "\n"


def _builtin(bounds, start, target, sigma, obstacles) -> Scenario:
    return Scenario(
        bounds=Bounds(*map(as_rational, bounds)),
        obstacles=tuple(Circle(RealPoint.of(*c), r) for c, r in obstacles),
        sigma=as_rational(sigma),
        start=RealPoint.of(*start),
        target=RealPoint.of(*target),
    )


# Both settings share the 10 m x 10 m environment from (1, 1) to (9, 9).
BUILTIN_SCENARIOS = {
    "setting1": _builtin((0, 10, 0, 10), (1, 1), (9, 9), "0.5", [((5, 5), "2.5")]),
    "setting2": _builtin((0, 10, 0, 10), (1, 1), (9, 9), "0.5", [((2, 4), 1), ((7, 8), "1.5")]),
    "open": _builtin((0, 10, 0, 10), (1, 1), (9, 9), "0.5", []),
}
