import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from oracles import winding_dense

from branchcut.errors import NotClosed, SchemaError, TangentialIntersection
from branchcut.paths import (
    ArcSegment, LineSegment, PiecewisePath, build_partition, crossing_sequence, point_depth, self_intersections,
    winding_number,
)

coord = st.integers(-3000, 3000).map(lambda k: k / 1000)
point = st.builds(complex, coord, coord)
SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])


def dense(path, n=20000):
    m = max(n // len(path.segments), 50)
    return np.concatenate([s.point(np.linspace(0, 1, m, endpoint=False)) for s in path.segments])


def generic_polygon(pts):
    """Reject polygons with near-degenerate edges or vertices close to other edges."""
    pts = list(pts)
    n = len(pts)
    for i in range(n):
        if abs(pts[i] - pts[(i + 1) % n]) < 0.2:
            return None
    path = PiecewisePath.polyline(pts + [pts[0]], closed=True)
    for i, p in enumerate(pts):
        for k, seg in enumerate(path.segments):
            if k in (i, (i - 1) % n):
                continue
            z = seg.point(np.linspace(0, 1, 400))
            if np.min(np.abs(z - p)) < 0.05:
                return None
    return path


def test_circle_winding_and_orientation():
    c = PiecewisePath.circle(0, 1)
    assert winding_number(c, 0.2j) == 1
    assert winding_number(c, 2) == 0
    assert winding_number(c.reversed(), 0.1) == -1
    assert winding_number(PiecewisePath.circle(0, 1, ccw=False), 0) == -1


def test_radial_ray_crossing_sign():
    c = PiecewisePath.circle(0, 1)
    ray = PiecewisePath.segment(2, 0.01)
    xs = crossing_sequence(ray, c)
    assert len(xs) == 1 and xs[0].sign == 1 and abs(xs[0].point - 1) < 1e-12


def test_in_and_out_crossings_cancel():
    c = PiecewisePath.circle(0, 1)
    chord = PiecewisePath.segment(-2 + 0.3j, 2 + 0.3j)
    xs = crossing_sequence(chord, c)
    assert [x.sign for x in xs] == [xs[0].sign, -xs[0].sign]


def test_disjoint_aux_has_no_crossings():
    assert crossing_sequence(PiecewisePath.segment(5, 6), PiecewisePath.circle()) == []


def test_figure_eight_self_crossing():
    pts = [0, 2 + 2j, 2, 2j, 0]
    bow = PiecewisePath.polyline(pts, closed=True)
    xs = self_intersections(bow)
    assert len(xs) == 1 and abs(xs[0].point - (1 + 1j)) < 1e-12
    part = build_partition(bow)
    assert sorted(part.mus) == [-1, 0, 1]


def test_not_closed_and_schema_errors():
    with pytest.raises(NotClosed):
        PiecewisePath.polyline([0, 1, 1j], closed=True)
    with pytest.raises(SchemaError):
        PiecewisePath.from_json({"segments": [{"kind": "line", "points": [[0, 0]]}]})
    with pytest.raises(SchemaError):
        PiecewisePath.from_json({"segments": [{"kind": "spline", "points": []}]})
    with pytest.raises(SchemaError):
        PiecewisePath([LineSegment(0, 1), LineSegment(2, 3)])


def test_tangential_contact_rejected():
    # a unit circle and an edge touching it at i, both at interior parameters
    circ = ArcSegment.circle(0, 1, ccw=True, theta0=math.pi)
    edges = [LineSegment(-1, -1.5 + 1j), LineSegment(-1.5 + 1j, 1.5 + 1j), LineSegment(1.5 + 1j, -1)]
    with pytest.raises(TangentialIntersection):
        self_intersections(PiecewisePath([circ] + edges, True))


def test_json_round_trip():
    p = PiecewisePath.from_json({"segments": [
        {"kind": "polyline", "points": [[0, 0], [1, 0], [1, 1]]},
        {"kind": "arc", "points": [[1, 1], [0, 0]], "center": [0.5, 0.5], "ccw": True}]})
    q = PiecewisePath.from_json(p.to_json())
    for s, t in zip(p.segments, q.segments):
        u = np.linspace(0, 1, 7)
        assert np.allclose(s.point(u), t.point(u))
    assert p.closed and q.closed


def test_point_depth_nested():
    outer = PiecewisePath.circle(0, 2)
    inner = PiecewisePath.circle(0, 1)
    part = build_partition(PiecewisePath.union([outer, inner]))
    assert point_depth(part, 0)[0] == 2
    assert point_depth(part, 1.5)[0] == 1
    assert point_depth(part, 5)[0] == 0


@SETTINGS
@given(st.lists(point, min_size=3, max_size=7), point)
def test_winding_matches_dense_oracle_and_reversal(pts, z):
    path = generic_polygon(pts)
    assume(path is not None)
    assume(path.distance(z) > 1e-3)
    w = winding_number(path, z)
    assert w == winding_dense(dense(path), z)
    assert winding_number(path.reversed(), z) == -w


@SETTINGS
@given(st.lists(point, min_size=3, max_size=6), st.lists(point, min_size=3, max_size=6), point)
def test_concatenated_loops_add_winding(p1, p2, z):
    base = p1[0]
    p2 = [base] + p2[1:]
    a, b = generic_polygon(p1), generic_polygon(p2)
    assume(a is not None and b is not None)
    both = a.concat(b, closed=True)
    assume(both.distance(z) > 1e-3)
    assert winding_number(both, z) == winding_number(a, z) + winding_number(b, z)


@SETTINGS
@given(st.lists(point, min_size=3, max_size=7))
def test_adjacent_regions_differ_by_one(pts):
    path = generic_polygon(pts)
    assume(path is not None)
    try:
        part = build_partition(path)
    except TangentialIntersection:
        assume(False)
    for r in part.regions:
        assert winding_number(path, r.point) == r.mu
        for nb, _ in r.adjacency:
            assert abs(part.regions[nb].mu - r.mu) == 1


@SETTINGS
@given(st.lists(point, min_size=3, max_size=7), point, point)
def test_crossing_signs_sum_to_winding_change(pts, z0, z1):
    path = generic_polygon(pts)
    assume(path is not None)
    assume(abs(z1 - z0) > 0.1)
    aux = PiecewisePath.segment(z0, z1)
    assume(path.distance(z0) > 1e-2 and path.distance(z1) > 1e-2)
    # keep vertices of the polygon away from the auxiliary segment
    d = z1 - z0
    for p in pts:
        t = min(max(((p - z0) * d.conjugate()).real / abs(d) ** 2, 0), 1)
        assume(abs(p - (z0 + t * d)) > 1e-2)
    try:
        xs = crossing_sequence(aux, path)
    except Exception:
        assume(False)
    assert sum(x.sign for x in xs) == winding_number(path, z1) - winding_number(path, z0)


def test_arc_lengths():
    c = PiecewisePath.circle(1j, 2)
    assert math.isclose(c.total_length, 4 * math.pi, rel_tol=1e-12)
