"""Reference decision procedure: depth-first branch and bound over the integer grid.

Waypoints are placed left to right, each one scanning its interval in
lexicographic ``(x, y)`` order, so the first satisfying leaf (and therefore
the returned model) is fully determined by the query. A subtree is cut when
``cost so far + straight line to the target >= J_c``; the straight line is a
lower bound on any completion, so the cut never loses a solution.

Everything runs on the query's scaled integer coordinates. Clearance tests
are pure integer arithmetic; cost comparisons use floats with a safety margin
and fall back to exact ``RootSum`` arithmetic when the margin is not met.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Optional

from ..encoder import OracleQuery
from ..exact import RootSum
from ..geometry import path_cost
from ..scenario import GridPath, grid_path_to_real
from . import TIMEOUT, UNSAT, OracleVerdict

_CHECK_EVERY = 2048


class Timeout(Exception):
    pass


class BranchAndBound:
    def __init__(self, query: OracleQuery, timeout: Optional[float] = None):
        self.query = query
        sc = query.scenario
        self.scale = query.scale
        unit = query.precision * query.scale
        self.start = (int(sc.start.x * unit), int(sc.start.y * unit))
        self.target = (int(sc.target.x * unit), int(sc.target.y * unit))
        self.obstacles = [
            (int(o.center.x * unit), int(o.center.y * unit), int((o.radius + sc.sigma) * unit) ** 2)
            for o in sc.obstacles
        ]
        cb = query.cost
        self.mult = cb.multiplier
        self.rhs = RootSum(cb.constant, [(s, Fraction(c)) for _, s, c in cb.roots])
        self.rhs_f = float(self.rhs)
        self.margin = 1e-9 * (1.0 + abs(self.rhs_f))
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.nodes = 0

    def clears(self, ax, ay, bx, by) -> bool:
        wx, wy = bx - ax, by - ay
        ww = wx * wx + wy * wy
        for cx, cy, r2 in self.obstacles:
            ux, uy = cx - ax, cy - ay
            uu = ux * ux + uy * uy
            if uu < r2:
                return False
            vx, vy = cx - bx, cy - by
            if vx * vx + vy * vy < r2:
                return False
            uw = ux * wx + uy * wy
            if 0 <= uw <= ww and uu * ww - uw * uw < r2 * ww:
                return False
        return True

    def below_bound(self, squares: list[int], approx: float) -> bool:
        """Is ``mult * sum(sqrt(squares)) < J_c`` (scaled)?"""
        lhs = self.mult * approx
        if lhs < self.rhs_f - self.margin:
            return True
        if lhs > self.rhs_f + self.margin:
            return False
        exact = RootSum()
        for n in squares:
            exact = exact + RootSum.sqrt(n)
        return exact * self.mult < self.rhs

    def _tick(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes % _CHECK_EVERY == 0:
            if time.monotonic() > self.deadline:
                raise Timeout

    def _candidates(self, level: int):
        (x_lo, x_hi), (y_lo, y_hi) = self.query.box.intervals[level]
        for x in range(x_lo, x_hi + 1):
            for y in range(y_lo, y_hi + 1):
                yield x, y

    def search(self) -> Optional[tuple[tuple[int, int], ...]]:
        if self.query.box.empty:
            return None
        return self._place(0, self.start, [], 0.0, [])

    def _place(self, level, prev, squares, approx, chosen):
        m = self.query.box.waypoints
        tx, ty = self.target
        s = self.scale
        last = level == m - 1
        for gx, gy in self._candidates(level):
            self._tick()
            px, py = gx * s, gy * s
            dx, dy = px - prev[0], py - prev[1]
            seg = dx * dx + dy * dy
            ex, ey = tx - px, ty - py
            rest = ex * ex + ey * ey
            here = approx + math.sqrt(seg)
            if not self.below_bound(squares + [seg, rest], here + math.sqrt(rest)):
                continue
            if not self.clears(prev[0], prev[1], px, py):
                continue
            if last:
                if self.clears(px, py, tx, ty):
                    return tuple(chosen + [(gx, gy)])
                continue
            found = self._place(level + 1, (px, py), squares + [seg], here, chosen + [(gx, gy)])
            if found is not None:
                return found
        return None


def builtin_decide(query: OracleQuery, timeout: Optional[float] = None) -> OracleVerdict:
    bnb = BranchAndBound(query, timeout)
    try:
        found = bnb.search()
    except Timeout:
        return TIMEOUT
    if found is None:
        return UNSAT
    model = GridPath(query.precision, found)
    return OracleVerdict.sat(model, path_cost(grid_path_to_real(model, query.scenario)))
