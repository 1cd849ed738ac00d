"""Independent reference procedures used by the tests.

Everything here goes through ``cegio.geometry`` with exact rationals and plain
enumeration; none of it shares code with the branch-and-bound search.
"""

import itertools
import shutil
from fractions import Fraction

from cegio.geometry import path_cost, path_feasible
from cegio.scenario import GridPath, grid_path_to_real


def box_points(interval):
    (x_lo, x_hi), (y_lo, y_hi) = interval
    return [(x, y) for x in range(x_lo, x_hi + 1) for y in range(y_lo, y_hi + 1)]


def feasible_grid_paths(scenario, p, box):
    """Every feasible grid path in ``box`` with its exact cost."""
    for combo in itertools.product(*(box_points(iv) for iv in box.intervals)):
        gp = GridPath(p, combo)
        path = grid_path_to_real(gp, scenario)
        if path_feasible(path, scenario):
            yield gp, path_cost(path)


def exhaustive_optimum(scenario, p, box):
    best = None
    for gp, cost in feasible_grid_paths(scenario, p, box):
        if best is None or cost < best[1]:
            best = (gp, cost)
    return best


def naive_decide(scenario, p, box, j_c):
    """True iff some feasible grid path in ``box`` costs less than ``j_c``."""
    return any(cost < j_c for _, cost in feasible_grid_paths(scenario, p, box))


def z3_command():
    exe = shutil.which("z3")
    return None if exe is None else (exe, "-in", "-smt2")


def sampled_clearance_sq(a, b, c, steps=1000):
    """Minimum squared distance over lambda in {0, 1/steps, ..., 1}."""
    best = None
    for i in range(steps + 1):
        lam = Fraction(i, steps)
        x = (1 - lam) * a[0] + lam * b[0] - c[0]
        y = (1 - lam) * a[1] + lam * b[1] - c[1]
        d = x * x + y * y
        if best is None or d < best:
            best = d
    return best
