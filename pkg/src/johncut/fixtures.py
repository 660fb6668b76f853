"""Deterministic polygon and smooth-domain generators."""

from __future__ import annotations

import math

import numpy as np

from .errors import UnknownKind
from .geom import Polygon, convex_hull, validate_polygon

KINDS = ("koch-variant", "comb", "notched-rect", "spiral", "l-shape", "random-convex", "blob")


def koch_ring(i: int, eta: float = 0.5, side: float = 1.0) -> np.ndarray:
    """Vertex ring of generation i: each generation g replaces the middle third of
    every edge by a tent with base angle pi/3 * eta**(g-1)."""
    h = side * math.sqrt(3) / 2
    z = np.array([0.0, side, side / 2 + 1j * h])
    for g in range(1, i + 1):
        phi = math.pi / 3 * eta ** (g - 1)
        a = z
        b = np.roll(z, -1)
        d = b - a
        p1 = a + d / 3
        p3 = a + 2 * d / 3
        # outward is to the right of a counter-clockwise edge
        apex = (p1 + p3) / 2 - 1j * (d / 6) * math.tan(phi)
        z = np.stack([a, p1, apex, p3], axis=1).ravel()
    return np.stack([z.real, z.imag], axis=1)


def koch_variant(i: int = 2, eta: float = 0.5, side: float = 1.0) -> Polygon:
    return validate_polygon(koch_ring(i, eta, side))


def koch_multiplier(g: int, eta: float = 0.5) -> float:
    """Perimeter ratio between generation g and g-1."""
    phi = math.pi / 3 * eta ** (g - 1)
    return 2 / 3 + 1 / (3 * math.cos(phi))


def ring_perimeter(ring: np.ndarray) -> float:
    return float(np.hypot(*(np.roll(ring, -1, axis=0) - ring).T).sum())


def comb(teeth: int = 3, width: float = 0.3, height: float = 2.0, gap: float = 0.7, base: float = 1.0,
         heights: list[float] | None = None) -> Polygon:
    """Rectangle base with rectangular teeth on top."""
    hs = heights or [height] * teeth
    pitch = width + gap
    total = teeth * pitch + gap
    pts = [(0.0, 0.0), (total, 0.0), (total, base)]
    for k in reversed(range(teeth)):
        x0 = gap + k * pitch
        pts += [(x0 + width, base), (x0 + width, base + hs[k]), (x0, base + hs[k]), (x0, base)]
    pts.append((0.0, base))
    return validate_polygon(pts)


def notched_rect(gap: float = 0.1, length: float = 10.0, height: float = 1.0, opening: float = 0.1) -> Polygon:
    m = length / 2
    return validate_polygon(
        [(0, 0), (length, 0), (length, height), (m + opening / 2, height), (m, gap), (m - opening / 2, height), (0, height)]
    )


def spiral(turns: int = 4, width: float = 0.4, step: float = 1.0) -> Polygon:
    """Rectangular spiral corridor of the given width around a square-spiral centreline."""
    dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    c = [np.zeros(2)]
    for k in range(4 * turns):
        d = np.array(dirs[k % 4], float)
        c.append(c[-1] + d * step * (k // 2 + 1))
    c = np.array(c)
    half = width / 2
    left, right = [], []
    for i in range(len(c)):
        if i == 0:
            din = dout = c[1] - c[0]
        elif i == len(c) - 1:
            din = dout = c[-1] - c[-2]
        else:
            din, dout = c[i] - c[i - 1], c[i + 1] - c[i]
        din = din / np.hypot(*din)
        dout = dout / np.hypot(*dout)
        nin = np.array([-din[1], din[0]])
        nout = np.array([-dout[1], dout[0]])
        if i == 0 or i == len(c) - 1:
            off = nin * half
        else:
            off = (nin + nout) * half  # right-angle corners
        left.append(c[i] + off)
        right.append(c[i] - off)
    ring = left + right[::-1]
    return validate_polygon(ring)


def l_shape() -> Polygon:
    return validate_polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


def rectangle(w: float = 4.0, h: float = 1.0) -> Polygon:
    return validate_polygon([(0, 0), (w, 0), (w, h), (0, h)])


def random_convex(seed: int = 0, n: int = 12, min_angle: float | None = None) -> Polygon:
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        pts = rng.uniform(-1, 1, size=(n, 2)) * rng.uniform(0.3, 1.0, size=2)
        h = convex_hull(pts)
        if len(h) < 3:
            continue
        P = validate_polygon(h)
        if min_angle is None or P.angles.min() >= min_angle:
            return P
    raise RuntimeError("could not draw a convex polygon with the requested angles")


def long_convex(seed: int = 0, aspect: float = 40.0, n: int = 10) -> Polygon:
    """Elongated convex polygon with every angle >= pi/4: a tapered slab with polygonal end caps."""
    rng = np.random.default_rng(seed)
    h0, h1 = rng.uniform(0.6, 1.0), rng.uniform(0.6, 1.0)  # half-heights at the two ends
    pts = []
    for cx, h, a0 in ((aspect, h1, -math.pi / 2), (0.0, h0, math.pi / 2)):
        k = int(rng.integers(2, max(3, n // 2) + 1))
        for j in range(k + 1):
            phi = a0 + math.pi * j / k
            pts.append((cx + h * math.cos(phi), h * math.sin(phi)))
    return validate_polygon(convex_hull(np.array(pts)))


def blob(seed: int = 0, n: int = 200, amp: float = 0.35, harmonics: int = 9) -> Polygon:
    """Star-shaped polygon with random Fourier radius."""
    rng = np.random.default_rng(seed)
    phi = 2 * math.pi * np.arange(n) / n
    r = np.ones(n)
    for k in range(2, harmonics + 2):
        r += amp / k * rng.uniform(-1, 1) * np.cos(k * phi + rng.uniform(0, 2 * math.pi))
    r += 0.01 * rng.uniform(-1, 1, size=n)
    r = np.maximum(r, 0.2)
    return validate_polygon(np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1))


def generate(kind: str, **params) -> Polygon:
    table = {
        "koch-variant": lambda: koch_variant(int(params.get("i", 2)), float(params.get("eta", 0.5))),
        "comb": lambda: comb(int(params.get("teeth", 3))),
        "notched-rect": lambda: notched_rect(float(params.get("gap", 0.1))),
        "spiral": lambda: spiral(int(params.get("turns", 4))),
        "l-shape": l_shape,
        "random-convex": lambda: random_convex(int(params.get("seed", 0)), int(params.get("n", 12))),
        "blob": lambda: blob(int(params.get("seed", 0)), int(params.get("n", 200))),
    }
    if kind not in table:
        raise UnknownKind(f"unknown fixture kind {kind!r}; choose from {', '.join(KINDS)}", step="generate")
    return table[kind]()


def corpus() -> dict[str, Polygon]:
    """The decomposition corpus: Koch variants, combs, notches, spirals, blobs and friends."""
    out = {}
    for i in range(4):
        out[f"koch-{i}"] = koch_variant(i)
    for t in (2, 3, 4, 5):
        out[f"comb-{t}"] = comb(t)
    for g in (0.1, 0.01, 0.004):
        out[f"notch-{g}"] = notched_rect(g)
    for t in (2, 3, 4):
        out[f"spiral-{t}"] = spiral(t)
    for s in range(4):
        out[f"blob-{s}"] = blob(s, 60 + 40 * s)
    out["l-shape"] = l_shape()
    out["random-convex"] = random_convex(7)
    return out


# ---------------------------------------------------------------------------
# smooth domains (dense rings)


def circle_ring(r: float = 1.0, n: int = 512, center=(0.0, 0.0)) -> np.ndarray:
    phi = 2 * math.pi * np.arange(n) / n
    return np.stack([center[0] + r * np.cos(phi), center[1] + r * np.sin(phi)], axis=1)


def ellipse_ring(a: float = 2.0, b: float = 0.5, n: int = 512) -> np.ndarray:
    phi = 2 * math.pi * np.arange(n) / n
    return np.stack([a * np.cos(phi), b * np.sin(phi)], axis=1)


def rounded_square_ring(side: float = 1.0, radius: float = 0.05, spacing: float | None = None) -> np.ndarray:
    """Square [0,side]^2 with circular corners, sampled at roughly uniform arclength."""
    spacing = spacing or radius / 4
    r = radius
    pts = []
    corners = [(side - r, r, -math.pi / 2), (side - r, side - r, 0.0), (r, side - r, math.pi / 2), (r, r, math.pi)]
    starts = [(r, 0.0), (side, r), (side - r, side), (0.0, side - r)]
    ends = [(side - r, 0.0), (side, side - r), (r, side), (0.0, r)]
    for (sx, sy), (ex, ey), (cx, cy, a0) in zip(starts, ends, corners):
        L = math.hypot(ex - sx, ey - sy)
        m = max(1, int(math.ceil(L / spacing)))
        for k in range(m):
            t = k / m
            pts.append((sx + t * (ex - sx), sy + t * (ey - sy)))
        m = max(2, int(math.ceil(r * math.pi / 2 / spacing)))
        for k in range(m):
            a = a0 + (math.pi / 2) * k / m
            pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return np.array(pts)


def smooth_blob_ring(seed: int = 0, n: int = 512, amp: float = 0.15) -> np.ndarray:
    rng = np.random.default_rng(seed)
    phi = 2 * math.pi * np.arange(n) / n
    r = np.ones(n)
    for k in range(2, 5):
        r += amp / k * rng.uniform(-1, 1) * np.cos(k * phi + rng.uniform(0, 2 * math.pi))
    return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
