import math
from fractions import Fraction

import numpy as np
import pytest
import shapely
from hypothesis import assume, given
from hypothesis import strategies as st

from johncut.errors import DegenerateArea, EmptyCurve, InvalidEta, SegmentNotInPolygon, SelfIntersecting, TooFewVertices
from johncut.fixtures import blob, l_shape
from johncut.geom import (Polygon, boundary_distance, carrot_margin, carrot_membership, cigar_margin, cigar_membership,
                          convex_hull, directional_extent, min_max_extent, point_in_polygon, points_in_polygon,
                          segment_in_polygon, tolerance_for, validate_polygon, visible_region_membership)
from johncut.predicates import orient2d, segments_intersect

from conftest import random_convex_points, rigid

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)

# slot cut from the right wall: hides (2,1.5) from every point of [(0,1),(4,1)]
OCCLUDED = [(0, 0), (4, 0), (4, 1.2), (0.5, 1.2), (0.5, 1.3), (4, 1.3), (4, 2), (0, 2)]


def dense_cigar_margin(a, b, eta, x, n=200001):
    a, b, x = (np.asarray(v, float) for v in (a, b, x))
    l = float(np.hypot(*(b - a)))
    t = np.linspace(0, l, n)
    g = a + t[:, None] / l * (b - a)
    return float(np.min(np.hypot(*(x - g).T) - eta * np.minimum(t, l - t)))


# ---------------------------------------------------------------------------
# validate_polygon


def test_unit_square(square):
    assert square.area == pytest.approx(1.0, abs=1e-15)
    assert square.perimeter == pytest.approx(4.0, abs=1e-15)
    assert square.concave == ()
    assert square.is_convex


def test_l_shape_area_perimeter_and_concave_vertex(lshape):
    assert lshape.area == pytest.approx(3.0, abs=1e-15)
    assert lshape.perimeter == pytest.approx(8.0, abs=1e-15)
    assert [lshape.vertex(i) for i in lshape.concave] == [(1.0, 1.0)]
    assert lshape.angles[lshape.concave[0]] == pytest.approx(1.5 * math.pi, abs=1e-12)


def test_bowtie_rejected():
    with pytest.raises(SelfIntersecting):
        validate_polygon([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_too_few_and_degenerate():
    with pytest.raises(TooFewVertices):
        validate_polygon([(0, 0), (1, 0)])
    with pytest.raises(DegenerateArea):
        validate_polygon([(0, 0), (1, 0), (2, 0)])


def test_clockwise_input_reversed_and_duplicates_collapsed():
    P = validate_polygon([(0, 0), (0, 1), (1, 1), (1, 1), (1, 0)])
    assert P.n == 4
    assert P.signed_area > 0


def test_nonfinite_rejected():
    with pytest.raises((ValueError, DegenerateArea, SelfIntersecting)):
        validate_polygon([(0, 0), (1, 0), (float("nan"), 1)])


@given(st.integers(0, 10_000))
def test_area_shoelace_vs_trapezoids_and_orientation(seed):
    P = blob(seed % 50, 40)
    v = P.arr
    w = np.roll(v, -1, axis=0)
    trap = float(np.sum((w[:, 0] - v[:, 0]) * (w[:, 1] + v[:, 1]))) / -2
    assert P.signed_area == pytest.approx(trap, rel=1e-12)
    from johncut.geom import signed_area
    assert signed_area(v[::-1]) == pytest.approx(-P.signed_area, rel=1e-12)


@given(st.integers(0, 10_000))
def test_interior_angle_sum(seed):
    P = blob(seed % 50, 30 + seed % 40)
    assert float(P.angles.sum()) == pytest.approx((P.n - 2) * math.pi, abs=1e-9)


def test_interior_angles_match_shapely_area_sign():
    P = l_shape()
    assert shapely.Polygon(P.arr).area == pytest.approx(P.area, rel=1e-15)


# ---------------------------------------------------------------------------
# predicates


@given(coord, coord, coord, coord, st.floats(0, 1), st.floats(-1e-12, 1e-12))
def test_orient2d_matches_exact_rationals(ax, ay, bx, by, t, nudge):
    cx = ax + t * (bx - ax) + nudge
    cy = ay + t * (by - ay)
    det = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (Fraction(by) - Fraction(ay)) * (
        Fraction(cx) - Fraction(ax))
    expected = (det > 0) - (det < 0)
    assert orient2d((ax, ay), (bx, by), (cx, cy)) == expected


def test_orient2d_classic_near_collinear():
    # exact evaluation resolves what naive floating point gets wrong
    a, b = (0.5, 0.5), (12.0, 12.0)
    c = (24.0, 24.0 + 2.0**-48)
    assert orient2d(a, b, c) == 1
    assert orient2d(a, b, (24.0, 24.0)) == 0


def test_segments_intersect_touching_and_disjoint():
    assert segments_intersect((0, 0), (1, 0), (1, 0), (2, 1))
    assert not segments_intersect((0, 0), (1, 0), (0, 1), (1, 1))


# ---------------------------------------------------------------------------
# containment


def test_segment_in_polygon_examples(lshape, square):
    assert segment_in_polygon(lshape, ((0.5, 0.5), (1.5, 0.5)))
    assert not segment_in_polygon(lshape, ((2, 1), (1, 2)))
    assert segment_in_polygon(square, ((0, 0), (1, 1)))
    assert segment_in_polygon(lshape, ((1, 1), (1, 0)))
    assert segment_in_polygon(lshape, ((0, 0), (2, 0)))


@given(st.integers(0, 3), st.integers(0, 100_000))
def test_segment_in_polygon_agrees_with_shapely(which, seed):
    P = [l_shape(), blob(1, 60), blob(2, 80), validate_polygon(OCCLUDED)][which]
    rng = np.random.default_rng(seed)
    lo, hi = P.arr.min(0), P.arr.max(0)
    a, b = rng.uniform(lo, hi, size=(2, 2))
    shp = shapely.Polygon(P.arr)
    seg = shapely.LineString([a, b])
    # keep clear of grazing contacts, where the closed-set answer depends on a tolerance
    d = shp.exterior.distance(seg)
    assume(d > 1e-6)
    assert segment_in_polygon(P, (a, b)) == shp.covers(seg)


@given(st.integers(0, 100_000))
def test_points_in_polygon_agrees_with_shapely(seed):
    P = blob(seed % 7, 90)
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.6, 1.6, size=(300, 2))
    shp = shapely.Polygon(P.arr)
    far = shapely.distance(shapely.points(X), shp.exterior) > 1e-9
    expected = shapely.contains_xy(shp, X[:, 0], X[:, 1])
    got = points_in_polygon(P, X)[0]
    assert np.array_equal(got[far], expected[far])


def test_point_in_polygon_closed(square):
    assert point_in_polygon(square, (0, 0.5))
    assert point_in_polygon(square, (1, 1))
    assert not point_in_polygon(square, (1 + 1e-6, 0.5))


def test_boundary_distance_small_and_large_paths_agree_with_shapely():
    rng = np.random.default_rng(3)
    for P in (l_shape(), blob(0, 120)):
        X = rng.uniform(-1, 2, size=(500, 2))
        ref = shapely.distance(shapely.points(X), shapely.LinearRing(P.arr))
        assert np.allclose(boundary_distance(P, X), ref, atol=1e-12)


def test_tolerance_scales_with_bbox_diagonal(monkeypatch):
    t = tolerance_for([(0, 0), (3, 4)])
    assert t.eps == pytest.approx(5e-9)
    monkeypatch.setenv("JOHNCUT_TOL", "1e-6")
    assert tolerance_for([(0, 0), (3, 4)]).eps == pytest.approx(5e-6)


# ---------------------------------------------------------------------------
# cigars and carrots


def test_cigar_examples():
    assert cigar_membership((0, 0), (2, 0), 0.5, (1, 0.4))
    assert not cigar_membership((0, 0), (2, 0), 0.5, (0.2, 0.2))
    assert not cigar_membership((0, 0), (2, 0), 0.5, (0, 0))


def test_cigar_example_discriminant():
    # along the axis |x-g(t)|^2 - (t/2)^2 = 0.75t^2 - 0.4t + 0.08 has negative discriminant
    assert 0.4**2 - 4 * 0.75 * 0.08 < 0
    assert cigar_margin((0, 0), (2, 0), 0.5, (0.2, 0.2)) > 0


def test_cigar_invalid_eta():
    with pytest.raises(InvalidEta):
        cigar_membership((0, 0), (1, 0), 1.0, (0.5, 0))
    with pytest.raises(InvalidEta):
        cigar_membership((0, 0), (1, 0), 0.0, (0.5, 0))


@given(coord, coord, coord, coord, coord, coord, st.floats(0.01, 0.99))
def test_cigar_margin_matches_dense_oracle(ax, ay, bx, by, xx, xy, eta):
    assume(math.hypot(bx - ax, by - ay) > 0.1)
    m = cigar_margin((ax, ay), (bx, by), eta, (xx, xy))
    ref = dense_cigar_margin((ax, ay), (bx, by), eta, (xx, xy))
    l = math.hypot(bx - ax, by - ay)
    assert m <= ref + 1e-9
    assert m >= ref - 2 * l / 200000


@given(coord, coord, coord, coord, coord, coord, st.floats(0.01, 0.99))
def test_cigar_symmetric_under_endpoint_swap_and_reflection(ax, ay, bx, by, xx, xy, eta):
    assume(math.hypot(bx - ax, by - ay) > 0.1)
    a, b, x = np.array([ax, ay]), np.array([bx, by]), np.array([xx, xy])
    u = (b - a) / np.linalg.norm(b - a)
    mid = (a + b) / 2
    xr = x - 2 * ((x - mid) @ u) * u
    m1 = cigar_margin(a, b, eta, x)
    assert cigar_margin(b, a, eta, x) == pytest.approx(m1, abs=1e-9)
    assert cigar_margin(a, b, eta, xr) == pytest.approx(m1, abs=1e-9)


def test_carrot_examples():
    g = [(0, 0), (1, 0)]
    assert carrot_membership(g, 0.5, (0.5, 0.2))
    assert not carrot_membership(g, 0.5, (0, 0.1))
    assert carrot_membership(g, 0.5, (1, 0))


def test_carrot_errors():
    with pytest.raises(EmptyCurve):
        carrot_membership([(0, 0)], 0.5, (0, 0))
    with pytest.raises(EmptyCurve):
        carrot_membership([(0, 0), (0, 0)], 0.5, (0, 0))
    with pytest.raises(InvalidEta):
        carrot_membership([(0, 0), (1, 0)], 1.5, (0, 0))


@given(st.lists(st.tuples(coord, coord), min_size=2, max_size=6), coord, coord, st.floats(0.01, 0.5),
       st.floats(0.01, 0.49))
def test_carrot_monotone_in_eta(pts, xx, xy, eta, d):
    assume(sum(math.dist(p, q) for p, q in zip(pts, pts[1:])) > 1e-3)
    if carrot_membership(pts, eta, (xx, xy)):
        assert carrot_membership(pts, eta + d, (xx, xy))


@given(st.lists(st.tuples(coord, coord), min_size=2, max_size=6), coord, coord, st.floats(0.01, 0.9))
def test_carrot_matches_dense_oracle(pts, xx, xy, eta):
    P = np.asarray(pts, float)
    seg = np.linalg.norm(np.diff(P, axis=0), axis=1)
    assume(seg.sum() > 1e-3)
    s = np.linspace(0, seg.sum(), 100001)
    cum = np.concatenate([[0], np.cumsum(seg)])
    g = np.stack([np.interp(s, cum, P[:, 0]), np.interp(s, cum, P[:, 1])], axis=1)
    ref = float(np.min(np.hypot(*(np.array([xx, xy]) - g).T) - eta * s))
    m = carrot_margin(P, eta, (xx, xy))
    assert ref - 2 * seg.sum() / 100000 <= m <= ref + 1e-9


def test_carrot_contained_in_doubled_cigar():
    # B(g(t), eta t) with t <= l lies in the cigar of the doubled segment at parameter eta
    rng = np.random.default_rng(0)
    a, b = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    for x in rng.uniform(-0.5, 1.5, size=(400, 2)):
        if carrot_membership([a, b], 0.3, x):
            assert cigar_membership(a, 2 * b - a, 0.3, x)


# ---------------------------------------------------------------------------
# visible region


def test_visible_region_examples(lshape):
    assert visible_region_membership(lshape, ((1, 1), (1, 0)), 0.3, (1.05, 0.5))
    assert not visible_region_membership(lshape, ((1, 1), (1, 0)), 0.3, (1.9, 0.5))


def test_visible_region_occluded():
    P = validate_polygon(OCCLUDED)
    assert cigar_membership((0, 1), (4, 1), 0.3, (2, 1.5))
    assert not visible_region_membership(P, ((0, 1), (4, 1)), 0.3, (2, 1.5))
    assert visible_region_membership(P, ((0, 1), (4, 1)), 0.3, (2, 1.1))


def test_visible_region_chord_outside(lshape):
    with pytest.raises(SegmentNotInPolygon):
        visible_region_membership(lshape, ((2, 1), (1, 2)), 0.3, (1.5, 1.2))


# ---------------------------------------------------------------------------
# extents


def test_extent_examples(rect4, lshape):
    assert directional_extent(rect4, 0.0) == pytest.approx(4.0)
    assert directional_extent(rect4, math.pi / 2) == pytest.approx(1.0)
    w, d, _ = min_max_extent(rect4)
    assert (w, d) == pytest.approx((1.0, math.sqrt(17)))
    w, d, _ = min_max_extent(lshape)
    assert (w, d) == pytest.approx((2.0, 2 * math.sqrt(2)))


def oracle_extents(pts):
    """Width as min over shapely hull edges of the farthest point from the edge line; diameter by brute force."""
    h = np.asarray(shapely.MultiPoint(pts).convex_hull.exterior.coords)[:-1]
    widths = []
    for a, b in zip(h, np.roll(h, -1, axis=0)):
        n = np.array([a[1] - b[1], b[0] - a[0]]) / math.dist(a, b)
        widths.append(float(np.abs((pts - a) @ n).max()))
    diff = pts[:, None, :] - pts[None, :, :]
    return min(widths), float(np.sqrt((diff**2).sum(-1).max()))


@given(st.integers(0, 100_000), st.floats(0, 2 * math.pi), coord, coord)
def test_min_max_extent_oracle_and_rigid_invariance(seed, rot, sx, sy):
    pts = random_convex_points(np.random.default_rng(seed), 10)
    assume(len(convex_hull(pts)) >= 3)
    w, d, ang = min_max_extent(pts)
    bw, bd = oracle_extents(pts)
    assert w <= d
    assert w == pytest.approx(bw, abs=1e-6)
    assert d == pytest.approx(bd, abs=1e-6)
    assert directional_extent(pts, ang) == pytest.approx(w, abs=1e-12)
    w2, d2, _ = min_max_extent(rigid(rot, (sx, sy))(pts))
    assert (w2, d2) == pytest.approx((w, d), abs=1e-9)
    h = convex_hull(pts)
    assert min_max_extent(h)[:2] == pytest.approx((w, d), abs=1e-12)


def test_polygon_transformed_is_rigid(lshape):
    Q = lshape.transformed(rot=0.7, shift=(3, -2))
    assert isinstance(Q, Polygon)
    assert Q.area == pytest.approx(lshape.area, rel=1e-12)
    assert Q.perimeter == pytest.approx(lshape.perimeter, rel=1e-12)
