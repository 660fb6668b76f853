import math

import numpy as np
import pytest
import shapely
from hypothesis import given, settings
from hypothesis import strategies as st

from johncut.errors import AngleTooSharp, NotConvex
from johncut.fixtures import blob, comb, corpus, l_shape, long_convex, random_convex, rectangle, spiral
from johncut.geom import boundary_distance, min_max_extent, points_in_polygon, validate_polygon
from johncut.pipeline import CALIBRATED
from johncut.rotund import (certify_rotund, convex_ball_bound, decompose_rotund, inscribed_disk, part_seg_alpha,
                            rotundity, slab_partition_convex, split_ends, trim_sharp_angles)
from johncut.semiconvex import certify_semiconvex, check_part_seg_criterion, semiconvexity_ratio

NOTCH_END = [(0, 0), (100, 0), (100, 1), (2.05, 1), (2, 0.9), (1.95, 1), (0, 1)]
WEDGE = [(0, 0), (10, -0.5), (10, 0.5)]  # apex angle ~0.0999 rad


def grid_clearance_oracle(P, n=400):
    """Largest distance-to-boundary over an n x n grid of interior points (shapely)."""
    shp = shapely.Polygon(P.arr)
    lo, hi = P.arr.min(0), P.arr.max(0)
    xs, ys = np.meshgrid(np.linspace(lo[0], hi[0], n), np.linspace(lo[1], hi[1], n))
    X = np.stack([xs.ravel(), ys.ravel()], axis=1)
    X = X[shapely.contains_xy(shp, X[:, 0], X[:, 1])]
    return float(shapely.distance(shapely.points(X), shp.exterior).max())


def test_inscribed_disk_examples(square, rect4, lshape):
    c, r = inscribed_disk(square)
    assert c == pytest.approx((0.5, 0.5)) and r == pytest.approx(0.5)
    c, r = inscribed_disk(rect4)
    assert r == pytest.approx(0.5) and c[1] == pytest.approx(0.5) and 0.5 - 1e-9 <= c[0] <= 3.5 + 1e-9
    c, r = inscribed_disk(lshape)
    # stationarity c = sqrt(2)(1 - c) at the concave corner
    assert r == pytest.approx(2 - math.sqrt(2), rel=1e-7)
    assert c == pytest.approx((2 - math.sqrt(2),) * 2, abs=1e-6)


@pytest.mark.parametrize("name", ["l-shape", "comb-3", "spiral-2", "blob-0", "koch-2", "notch-0.1"])
def test_inscribed_disk_vs_grid_oracle(name):
    P = corpus()[name]
    c, r = inscribed_disk(P)
    assert boundary_distance(P, [c])[0] >= r - 1e-12
    assert points_in_polygon(P, [c])[0][0]
    ref = grid_clearance_oracle(P)
    assert r >= ref - 1e-12
    assert r <= ref + 2 * P.diag / 400


@settings(max_examples=15)
@given(st.integers(0, 1000), st.floats(0, 2 * math.pi), st.floats(0.2, 5.0))
def test_inscribed_radius_rigid_and_scale(seed, rot, scale):
    P = [l_shape(), comb(2), blob(seed % 3, 60)][seed % 3]
    r = inscribed_disk(P)[1]
    Q = P.transformed(rot=rot, scale=scale, shift=(2.0, -1.0))
    assert inscribed_disk(Q)[1] == pytest.approx(scale * r, rel=1e-6)


def test_certify_rotund_examples(square, lshape):
    assert certify_rotund(square, 0.35).passed
    assert not certify_rotund(square, 0.36).passed
    assert certify_rotund(lshape, 0.2).passed
    assert rotundity(lshape) == pytest.approx((2 - math.sqrt(2)) / (2 * math.sqrt(2)), rel=1e-7)
    cert = certify_rotund(lshape, 0.2)
    assert cert.radius >= 0.2 * cert.diameter


def test_convex_ball_bound_examples(rect4, square):
    assert convex_ball_bound(rect4)[1] >= 0.25
    tri = validate_polygon([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])
    c, r = convex_ball_bound(tri)
    assert r == pytest.approx(math.sqrt(3) / 6, rel=1e-9)
    assert r >= math.sqrt(3) / 8
    assert convex_ball_bound(square)[1] >= 0.25
    with pytest.raises(NotConvex):
        convex_ball_bound(l_shape())


@given(st.integers(0, 10**6))
def test_convex_ball_bound_quarter_width(seed):
    P = random_convex(seed)
    assert convex_ball_bound(P)[1] >= 0.25 * min_max_extent(P)[0]


def test_split_ends_trivial_for_square(square):
    es = split_ends(square, 0.5)
    assert es.trivial and es.pieces == (square,)


def test_split_ends_long_rectangle_without_concave_vertices():
    P = rectangle(100, 1)
    # 0.1^2 * 100 <= 12: early exit with the whole polygon as the single piece
    es = split_ends(P, 0.1)
    assert es.trivial and es.pieces == (P,)
    # 0.5^2 * 100 > 12, but no concave vertex is admissible: both ends empty, convex middle is P
    es = split_ends(P, 0.5)
    assert not es.trivial
    assert es.p1 is None and es.p2 is None and es.pmid == P


def test_split_ends_notch_end():
    P = validate_polygon(NOTCH_END)
    vt = semiconvexity_ratio(P)[0] * 0.99
    es = split_ends(P, vt)
    assert not es.trivial
    ends = [q for q in (es.p1, es.p2) if q is not None]
    assert len(ends) == 1
    end = ends[0]
    assert (2.0, 0.9) in end.vertices
    assert es.pmid.is_convex
    assert sum(q.area for q in es.pieces) == pytest.approx(P.area, rel=1e-12)
    seg = es.segments[0]
    assert abs(seg.a[0] - seg.b[0]) < 1e-6  # vertical in the long-axis frame
    clauses = es.info["end1"] if "end1" in es.info else es.info["end2"]
    assert clauses["clause_i"] and seg.length <= vt * P.perimeter
    assert math.isfinite(clauses["C_ii"]) and math.isfinite(clauses["C_iii"])


def test_split_ends_pieces_pass_segment_criterion():
    P = validate_polygon(NOTCH_END)
    vt = semiconvexity_ratio(P)[0] * 0.99
    part = decompose_rotund(P, 0.5, vt, 0.01 * P.perimeter)
    assert all(v is not False for v in part.meta["part_seg"].values())


def test_slab_examples():
    part = slab_partition_convex(rectangle(4, 1), 0.5, aspect_factor=1, stop_factor=1)
    assert sorted(q.area for q in part.pieces) == pytest.approx([2.0, 2.0])
    xs = sorted(min(v[0] for v in q.vertices) for q in part.pieces)
    assert xs == pytest.approx([0.0, 2.0])
    assert len(slab_partition_convex(rectangle(1, 1), 0.5, aspect_factor=1, stop_factor=1).pieces) == 1
    # default factors keep an aspect-4 rectangle whole (4 < 7 / 0.5)
    assert len(slab_partition_convex(rectangle(4, 1), 0.5).pieces) == 1


def test_slab_errors(lshape):
    with pytest.raises(NotConvex):
        slab_partition_convex(lshape, 0.5)
    with pytest.raises(AngleTooSharp):
        slab_partition_convex(validate_polygon(WEDGE), 0.5)


def test_slab_long_trapezoid():
    P = validate_polygon([(0, 0), (60, 0), (59, 1), (1, 1)])
    theta = 0.25
    part = slab_partition_convex(P, theta)
    assert len(part.pieces) > 1
    assert part.cut_total <= theta * P.perimeter
    omega = CALIBRATED[theta][1]
    assert all(certify_rotund(q, omega).passed for q in part.pieces)
    assert part.identity_residual() < 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_slab_on_long_convex(seed):
    P = long_convex(seed, aspect=60 + 10 * seed)
    assert P.angles.min() >= math.pi / 4
    for theta in (0.25, 0.5):
        part = slab_partition_convex(P, theta)
        assert part.cut_total <= theta * P.perimeter
        assert part.area_residual() < 1e-9
        assert all(certify_rotund(q, CALIBRATED[theta][1]).passed for q in part.pieces)


def test_trim_sharp_angles_budget():
    P = validate_polygon(WEDGE)
    core, tris, chords = trim_sharp_angles(P, 0.05)
    assert len(tris) == 1
    assert sum(t.perimeter for t in tris) <= 0.05 + 1e-12
    assert core.angles.min() >= math.pi / 4
    assert core.area + tris[0].area == pytest.approx(P.area, rel=1e-12)


def test_decompose_rotund_examples(square):
    part = decompose_rotund(square, 0.5, 0.5, 0.01)
    assert part.pieces == (square,) and not part.exceptional
    part = decompose_rotund(rectangle(8, 1), 0.5, 0.1, 0.01, None, aspect_factor=1, stop_factor=1)
    assert sorted(q.area for q in part.pieces) == pytest.approx([2.0] * 4)
    assert not part.exceptional


def test_decompose_rotund_thin_wedge():
    P = validate_polygon(WEDGE)
    part = decompose_rotund(P, 0.5, 0.5, 0.05)
    assert len(part.exceptional) == 1
    assert part.exceptional_boundary <= 0.05 + 1e-12
    assert part.identity_residual() < 1e-12 and part.area_residual() < 1e-12
    for q in part.pieces:
        assert q.angles.min() >= math.pi / 4 - 1e-9
        assert certify_rotund(q, 0.04).passed
        assert certify_semiconvex(q, 0.9).passed


@pytest.mark.parametrize("name", ["l-shape", "comb-2", "spiral-2", "blob-1"])
def test_decompose_rotund_pieces_certify(name):
    P = corpus()[name]
    vt = semiconvexity_ratio(P, 0.25)[0] * (1 - 1e-9)
    eps = 0.01 * P.perimeter
    part = decompose_rotund(P, 0.25, vt, eps)
    assert part.exceptional_boundary <= eps
    assert part.identity_residual() < 1e-9
    for q in part.pieces:
        assert rotundity(q) > 0
