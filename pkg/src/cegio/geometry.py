"""Exact 2-D primitives: path length, segment points and segment/circle clearance.

Coordinates are Fractions; no operation here rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .exact import RootSum, as_rational


class RealPoint(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "RealPoint":
        return cls(as_rational(x), as_rational(y))

    def __sub__(self, other):
        return RealPoint(self.x - other.x, self.y - other.y)

    def __str__(self):
        return f"({self.x}, {self.y})"


class Segment(NamedTuple):
    a: RealPoint
    b: RealPoint


@dataclass(frozen=True)
class Circle:
    center: RealPoint
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", RealPoint.of(*self.center))
        object.__setattr__(self, "radius", as_rational(self.radius))
        if self.radius <= 0:
            raise ValueError(f"non-positive radius {self.radius}")


def dot(u: RealPoint, v: RealPoint) -> Fraction:
    return u.x * v.x + u.y * v.y


def segment_point(seg: Segment, lam) -> RealPoint:
    lam = as_rational(lam)
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda={lam} outside [0, 1]")
    a, b = seg
    return RealPoint((1 - lam) * a.x + lam * b.x, (1 - lam) * a.y + lam * b.y)


def path_cost(points: Sequence[RealPoint]) -> RootSum:
    """Sum of Euclidean segment lengths, as an exact RootSum."""
    if len(points) < 2:
        raise ValueError("a path needs at least two points")
    total = RootSum()
    for p, q in zip(points, points[1:]):
        d = q - p
        total = total + RootSum.sqrt(dot(d, d))
    return total


def segment_clearance_sq(seg: Segment, c: RealPoint) -> Fraction:
    """Squared distance from ``c`` to the closest point of ``seg``."""
    a, b = seg
    w = b - a
    u = c - a
    ww = dot(w, w)
    if ww == 0:
        return dot(u, u)
    t = min(max(dot(u, w) / ww, Fraction(0)), Fraction(1))
    r = RealPoint(u.x - t * w.x, u.y - t * w.y)
    return dot(r, r)


def segment_clears(seg: Segment, obstacle: Circle, sigma) -> bool:
    sigma = as_rational(sigma)
    if sigma < 0:
        raise ValueError("negative safety margin")
    reach = obstacle.radius + sigma
    return segment_clearance_sq(seg, obstacle.center) >= reach * reach


def path_feasible(path: Sequence[RealPoint], scenario) -> bool:
    """Vertices inside the environment box and every segment clear of every inflated obstacle.

    The box is convex, so vertex containment covers the segments too.
    """
    if len(path) < 2:
        raise ValueError("a path needs at least two points")
    if not all(scenario.bounds.contains(pt) for pt in path):
        return False
    for a, b in zip(path, path[1:]):
        seg = Segment(a, b)
        for obs in scenario.obstacles:
            if not segment_clears(seg, obs, scenario.sigma):
                return False
    return True
