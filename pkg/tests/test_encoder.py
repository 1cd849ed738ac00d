import itertools
from fractions import Fraction

import pytest

from cegio.encoder import DomainBox, Poly, encode
from cegio.exact import RootSum
from cegio.geometry import Circle, RealPoint, path_cost, path_feasible
from cegio.scenario import Bounds, GridPath, Scenario, grid_path_to_real
from oracles import box_points

P = RealPoint.of


def test_setting1_query_shape(setting1):
    q = encode(setting1, 1, 1, DomainBox.full(setting1, 1, 1), 25)
    assert [(v.name, v.lo, v.hi) for v in q.variables] == [("x_0_0", 0, 10), ("x_0_1", 0, 10)]
    assert len(q.clearance) == 2 * 1
    assert [(g.segment, g.obstacle) for g in q.clearance] == [(0, 0), (1, 0)]
    assert [d.name for d in q.distances] == ["d_0", "d_1"]
    assert q.scale == 1
    assert (q.cost.multiplier, q.cost.constant, q.cost.roots) == (1, 25, ())


def test_setting2_counts(setting2):
    q = encode(setting2, 1, 2, DomainBox.full(setting2, 1, 2), 20)
    assert len(q.variables) == 4
    assert len(q.clearance) == 3 * 2
    # inflated radii 1.5 and 2.0 need half units
    assert q.scale == 2


def test_constraints_reference_declared_variables_only(setting2):
    q = encode(setting2, 10, 2, DomainBox.full(setting2, 10, 2), 20)
    declared = {v.name for v in q.variables}
    for g in q.clearance:
        for clause in g.clauses:
            for atom in clause:
                assert atom.poly.variables() <= declared
                assert all(isinstance(c, int) for c in atom.poly.terms.values())
    for d in q.distances:
        assert d.squared.variables() <= declared


def test_irrational_bound_is_encoded_exactly(setting1):
    j_c = 8 * RootSum.sqrt(2) + Fraction(1, 100)
    q = encode(setting1, 10, 1, DomainBox.full(setting1, 10, 1), j_c)
    # 10 * (8 sqrt 2 + 1/100) = 80 sqrt 2 + 1/10, scaled by 10 to clear the denominator
    assert q.cost.multiplier == 10
    assert q.cost.constant == 1
    assert q.cost.roots == (("root_2", 2, 800),)


def test_encode_errors(setting1):
    box = DomainBox.full(setting1, 1, 1)
    with pytest.raises(ValueError):
        encode(setting1, 1, 1, box, 0)
    with pytest.raises(ValueError):
        encode(setting1, 1, 1, DomainBox((((0, 11), (0, 10)),)), 25)
    with pytest.raises(ValueError):
        encode(setting1, 1, 2, box, 25)
    with pytest.raises(ValueError):
        encode(setting1, 3, 1, box, 25)
    # below the straight-line distance is allowed
    encode(setting1, 1, 1, box, 5)


def test_poly_arithmetic():
    x, y = Poly.var("x"), Poly.var("y")
    p = (x - y) * (x + y)
    assert p == x * x - y * y
    assert p.evaluate({"x": 3, "y": 2}) == 5
    assert (x * 0).terms == {}


def _geometric_truth(scenario, p, gp, j_c):
    path = grid_path_to_real(gp, scenario)
    return path_feasible(path, scenario) and path_cost(path) < j_c


SKEWED = Scenario(
    Bounds(Fraction(0), Fraction(6), Fraction(0), Fraction(5)),
    (Circle(P("2.6", "2.3"), Fraction("1.15")), Circle(P("4.5", "1.1"), Fraction("0.4"))),
    Fraction("0.25"),
    P("0.5", "4.5"),
    P("5.5", "0.5"),
)


@pytest.mark.parametrize("name, j_c", [
    ("setting1", 25), ("setting1", 13), ("setting1", "14.1421356"), ("setting1", 8 * RootSum.sqrt(2) + 3),
    ("setting2", 12), ("setting2", "11.9"), ("skewed", 8), ("skewed", 7),
])
def test_encoding_matches_geometry_on_whole_grid(name, j_c, setting1, setting2):
    scenario = {"setting1": setting1, "setting2": setting2, "skewed": SKEWED}[name]
    box = DomainBox.full(scenario, 1, 1)
    q = encode(scenario, 1, 1, box, j_c)
    agree = 0
    for pt in box_points(box.intervals[0]):
        gp = GridPath(1, [pt])
        assert q.holds(q.assignment(gp)) == _geometric_truth(scenario, 1, gp, RootSum.coerce(j_c)), pt
        agree += 1
    assert agree == box.size()


def test_encoding_matches_geometry_two_waypoints_fine_grid(setting2):
    box = DomainBox((((40, 46), (18, 24)), ((84, 90), (62, 68))))
    j_c = Fraction("12.2")
    q = encode(setting2, 10, 2, box, j_c)
    hits = 0
    for a, b in itertools.product(box_points(box.intervals[0]), box_points(box.intervals[1])):
        gp = GridPath(10, [a, b])
        truth = _geometric_truth(setting2, 10, gp, j_c)
        assert q.holds(q.assignment(gp)) == truth
        hits += truth
    assert 0 < hits < box.size()


def test_decode_round_trip(setting1):
    q = encode(setting1, 1, 2, DomainBox.full(setting1, 1, 2), 25)
    gp = GridPath(1, [(2, 8), (3, 9)])
    assert q.decode(q.assignment(gp)) == gp


def test_empty_box(setting1):
    box = DomainBox((((5, 4), (0, 10)),))
    assert box.empty
    assert box.size() == 0
    encode(setting1, 1, 1, box, 25)
