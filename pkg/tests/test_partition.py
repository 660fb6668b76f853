import math

import numpy as np
import pytest
import shapely
from hypothesis import assume, given
from hypothesis import strategies as st

from johncut.errors import ChordExitsPolygon, ChordOnBoundary, ChordTouchesBoundaryInternally, JohnCutError, NotAdjacent
from johncut.fixtures import blob, comb, l_shape, random_convex, spiral
from johncut.geom import validate_polygon
from johncut.partition import Chord, Partition, ledger_check, merge_polygons, select_Qvw, shared_length, split_by_chord


def ring_set(Q):
    return {tuple(map(float, v)) for v in Q.vertices}


def cyclic_equal(a, b, tol=1e-9):
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.shape != b.shape:
        return False
    return any(np.allclose(np.roll(b, -k, axis=0), a, atol=tol) for k in range(len(b)))


def test_axis_cut(lshape):
    sr = split_by_chord(lshape, (1, 1), (1, 0))
    assert sorted((sr.q1.area, sr.q2.area)) == pytest.approx([1.0, 2.0])
    assert (sr.n1, sr.n2) == (0, 0)
    for Q in (sr.q1, sr.q2):
        assert {(1.0, 1.0), (1.0, 0.0)} <= ring_set(Q)
    inter = shapely.Polygon(sr.q1.arr).intersection(shapely.Polygon(sr.q2.arr))
    assert inter.area == pytest.approx(0.0, abs=1e-15)
    assert inter.length == pytest.approx(1.0)


def test_diagonal_cut(lshape):
    sr = split_by_chord(lshape, (1, 1), (0, 0))
    got = {frozenset(ring_set(sr.q1)), frozenset(ring_set(sr.q2))}
    assert got == {frozenset({(0, 0), (2, 0), (2, 1), (1, 1)}), frozenset({(0, 0), (1, 1), (1, 2), (0, 2)})}
    assert (sr.q1.area, sr.q2.area) == pytest.approx((1.5, 1.5))


def test_chord_errors(square, lshape):
    with pytest.raises(ChordOnBoundary):
        split_by_chord(square, (0, 0), (1, 0))
    with pytest.raises(ChordExitsPolygon):
        split_by_chord(lshape, (2, 1), (1, 2))
    with pytest.raises(ChordExitsPolygon):
        split_by_chord(lshape, (0.5, 0.5), (1, 0))
    P = validate_polygon([(0, 0), (4, 0), (4, 2), (2, 1), (0, 2)])
    with pytest.raises(ChordTouchesBoundaryInternally):
        split_by_chord(P, (0, 1), (4, 1))


def test_edge_interior_endpoint_inserted(square):
    sr = split_by_chord(square, (0.5, 0), (0.5, 1))
    assert sr.q1.area == pytest.approx(0.5)
    assert (0.5, 0.0) in ring_set(sr.q1) and (0.5, 0.0) in ring_set(sr.q2)


def test_select_smaller_area_side(lshape):
    sr = split_by_chord(lshape, (1, 1), (1, 0))
    side = select_Qvw(sr)
    chosen = sr.q1 if side == "Q1" else sr.q2
    assert chosen.area == pytest.approx(1.0)


def test_select_both_on_symmetric_hexagon():
    hexagon = validate_polygon([(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)])
    assert select_Qvw(split_by_chord(hexagon, hexagon.vertex(0), hexagon.vertex(3))) == "Both"


def test_select_by_concave_count_on_comb():
    P = comb(2)
    sr = split_by_chord(P, (0.7, 1.0), (0.7, 0.0))
    side = select_Qvw(sr)
    chosen, other = (sr.q1, sr.q2) if side == "Q1" else (sr.q2, sr.q1)
    assert {sr.n1, sr.n2} == {0, 3}
    assert chosen.area < other.area  # the empty side is also the small one here
    assert min(sr.n1, sr.n2) == (sr.n1 if side == "Q1" else sr.n2)


def test_select_concave_count_beats_area():
    # left part is larger but holds no other concave vertex
    P = comb(2, gap=0.7, width=0.3)
    sr = split_by_chord(P, (2.0, 1.0), (2.0, 0.0))
    side = select_Qvw(sr)
    n_side = sr.n1 if side == "Q1" else sr.n2
    assert n_side == min(sr.n1, sr.n2) and sr.n1 != sr.n2


def test_ledger_single_piece(lshape):
    part = Partition(lshape, (lshape,))
    ok, slack = ledger_check(part, 0.3)
    assert ok and slack == pytest.approx(0.3 * 8)


def test_ledger_one_cut(lshape):
    sr = split_by_chord(lshape, (1, 1), (1, 0))
    part = Partition(lshape, (sr.q1, sr.q2), cuts=(sr.chord,))
    assert part.boundary_total == pytest.approx(10.0)
    assert ledger_check(part, 0.25)[0]
    assert not ledger_check(part, 0.2)[0]
    assert part.identity_residual() < 1e-15


def chords_of(P, seed):
    rng = np.random.default_rng(seed)
    for _ in range(30):
        i, j = rng.choice(P.n, size=2, replace=False)
        try:
            return split_by_chord(P, P.vertex(i), P.vertex(j))
        except JohnCutError:
            continue
    return None


@given(st.integers(0, 100_000))
def test_split_invariants_and_remerge(seed):
    P = [random_convex(seed), l_shape(), spiral(2), comb(3), blob(seed % 4, 40)][seed % 5]
    sr = chords_of(P, seed)
    assume(sr is not None)
    H, L = P.perimeter, sr.chord.length
    assert sr.q1.perimeter + sr.q2.perimeter == pytest.approx(H + 2 * L, rel=1e-12)
    assert sr.q1.area + sr.q2.area == pytest.approx(P.area, rel=1e-12)
    overlap = shapely.Polygon(sr.q1.arr).intersection(shapely.Polygon(sr.q2.arr)).area
    assert overlap < 1e-9 * P.area
    assert sr.n1 + sr.n2 <= len(P.concave)
    orig = {P.vertex(i) for i in P.concave}
    for Q in (sr.q1, sr.q2):
        assert {Q.vertex(i) for i in Q.concave} <= orig
    M = merge_polygons(sr.q1, sr.q2, drop_straight=True)
    assert cyclic_equal(M.arr, P.arr)
    assert shared_length(sr.q1, sr.q2) == pytest.approx(L, rel=1e-12)


def test_merge_rejects_disjoint(square):
    other = square.transformed(shift=(3, 0))
    with pytest.raises(NotAdjacent):
        merge_polygons(square, other)


def test_chord_json():
    c = Chord((0.0, 0.0), (3.0, 4.0))
    assert c.to_json() == [[0.0, 0.0], [3.0, 4.0], 5.0]
