import math

import numpy as np
import pytest

from johncut.errors import UnknownKind
from johncut.fixtures import (KINDS, blob, circle_ring, comb, corpus, ellipse_ring, generate, koch_multiplier, koch_ring,
                              koch_variant, notched_rect, ring_perimeter, rounded_square_ring, smooth_blob_ring, spiral)
from johncut.geom import convex_hull, validate_polygon


def test_koch_generation_zero_is_the_triangle():
    P = koch_variant(0)
    assert P.n == 3
    assert P.perimeter == pytest.approx(3.0, abs=1e-12)
    assert P.area == pytest.approx(math.sqrt(3) / 4, abs=1e-12)


def test_koch_generation_one():
    assert koch_variant(1).perimeter == pytest.approx(4.0, abs=1e-12)
    assert koch_multiplier(1) == pytest.approx(4 / 3, abs=1e-15)


def test_koch_generation_two_multiplier():
    assert koch_multiplier(2, 0.5) == pytest.approx(1.0515668, abs=5e-8)
    ratio = koch_variant(2).perimeter / koch_variant(1).perimeter
    assert ratio == pytest.approx(koch_multiplier(2), rel=1e-12)


@pytest.mark.parametrize("eta", [0.3, 0.5, 0.8])
def test_koch_tent_geometry(eta):
    # every generation-g edge of length L becomes four edges: L/3, two tent sides, L/3
    for g in range(1, 5):
        a, b = koch_ring(g - 1, eta), koch_ring(g, eta)
        assert len(b) == 4 * len(a)
        phi = math.pi / 3 * eta ** (g - 1)
        L = np.hypot(*(np.roll(a, -1, axis=0) - a).T)
        e = np.hypot(*(np.roll(b, -1, axis=0) - b).T).reshape(-1, 4)
        assert np.allclose(e[:, 0], L / 3) and np.allclose(e[:, 3], L / 3)
        assert np.allclose(e[:, 1], L / (6 * math.cos(phi)))
        assert np.allclose(e[:, 2], L / (6 * math.cos(phi)))


def test_koch_variants_are_simple():
    for i in range(5):
        validate_polygon(koch_ring(i))


def test_unknown_kind():
    with pytest.raises(UnknownKind):
        generate("hexagon")


@pytest.mark.parametrize("kind", KINDS)
def test_generate_is_deterministic(kind):
    a, b = generate(kind), generate(kind)
    assert np.array_equal(a.arr, b.arr)
    assert a.area > 0


def test_generate_params():
    assert generate("comb", teeth="4").n == comb(4).n
    assert generate("koch-variant", i="1").perimeter == pytest.approx(4.0)
    assert np.array_equal(generate("blob", seed="2", n="80").arr, blob(2, 80).arr)


def test_comb_and_notch_shapes():
    P = comb(3)
    assert P.n == 4 + 4 * 3
    N = notched_rect(0.1)
    # the notch is a triangle of base 0.1 reaching down to height 0.1
    assert N.area == pytest.approx(10 - 0.5 * 0.1 * 0.9, rel=1e-12)
    assert spiral(3).n > spiral(2).n


def test_corpus_contents():
    C = corpus()
    assert len(C) >= 20
    assert {f"koch-{i}" for i in range(4)} <= set(C)
    assert {f"comb-{t}" for t in range(2, 6)} <= set(C)
    assert max(P.n for k, P in C.items() if k.startswith("blob")) <= 200


def test_smooth_rings():
    c = circle_ring(1.0, 512)
    assert ring_perimeter(c) == pytest.approx(2 * math.pi, rel=1e-4)
    e = ellipse_ring(2.0, 0.5)
    assert np.abs(e[:, 0]).max() == pytest.approx(2.0) and np.abs(e[:, 1]).max() == pytest.approx(0.5, rel=1e-3)
    r = rounded_square_ring(1.0, 0.05, spacing=0.005)
    assert ring_perimeter(r) == pytest.approx(4 - 8 * 0.05 + 2 * math.pi * 0.05, rel=1e-3)
    steps = np.hypot(*(np.roll(r, -1, axis=0) - r).T)
    assert steps.max() <= 0.005 * (1 + 1e-9)
    s = smooth_blob_ring(0)
    assert len(convex_hull(s)) > 10
