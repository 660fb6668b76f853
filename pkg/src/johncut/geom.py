"""Planar primitives: polygons, containment, cigars, carrots, extents."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
import shapely

from .errors import (
    DegenerateArea,
    EmptyCurve,
    InvalidEta,
    SegmentNotInPolygon,
    SelfIntersecting,
    TooFewVertices,
)
from .predicates import orient2d, orient2d_many, segments_cross_properly

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-9
DEFAULT_TOL_SCALE = 1e-9
VISIBILITY_CANDIDATES = 64

Point = tuple[float, float]


class Segment(NamedTuple):
    a: Point
    b: Point

    @property
    def length(self) -> float:
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])


@dataclass(frozen=True)
class Tolerance:
    eps: float
    relative: bool = True

    def __post_init__(self):
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ValueError("tolerance must be positive and finite")


def tolerance_scale() -> float:
    raw = os.environ.get("JOHNCUT_TOL")
    if raw:
        try:
            val = float(raw)
        except ValueError:
            return DEFAULT_TOL_SCALE
        if val > 0 and math.isfinite(val):
            return val
    return DEFAULT_TOL_SCALE


def tolerance_for(points, scale: float | None = None) -> Tolerance:
    """eps = scale * bounding-box diagonal (scale defaults to JOHNCUT_TOL or 1e-9)."""
    pts = np.asarray(points, float)
    diag = float(np.hypot(*(pts.max(0) - pts.min(0)))) if len(pts) else 1.0
    s = tolerance_scale() if scale is None else scale
    return Tolerance(max(s * diag, 1e-300), True)


def signed_area(points) -> float:
    p = np.asarray(points, float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class Polygon:
    """Closed simple polygon, counter-clockwise. Equality and hash use the vertex tuple only."""

    vertices: tuple[Point, ...]
    eps: float = field(default=0.0, compare=False)

    @classmethod
    def trusted(cls, verts, eps: float | None = None) -> "Polygon":
        """Wrap vertices already known to form a valid CCW simple ring."""
        vt = tuple((float(x), float(y)) for x, y in verts)
        if eps is None:
            eps = tolerance_for(vt).eps
        return cls(vt, eps)

    @cached_property
    def ring_geometry(self):
        """The boundary as a GEOS ring, for fast point-to-boundary distances."""
        return shapely.LinearRing(self.arr)

    @cached_property
    def arr(self) -> np.ndarray:
        a = np.array(self.vertices, float)
        a.setflags(write=False)
        return a

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def signed_area(self) -> float:
        return signed_area(self.arr)

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @cached_property
    def edge_vectors(self) -> np.ndarray:
        return np.roll(self.arr, -1, axis=0) - self.arr

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edge_vectors[:, 0], self.edge_vectors[:, 1])

    @cached_property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    @cached_property
    def cum_length(self) -> np.ndarray:
        """Arclength of each vertex from vertex 0; last entry is the perimeter."""
        return np.concatenate([[0.0], np.cumsum(self.edge_lengths)])

    @cached_property
    def angles(self) -> np.ndarray:
        v = self.arr
        a = np.roll(v, -1, axis=0) - v
        b = np.roll(v, 1, axis=0) - v
        ang = np.arctan2(_cross(a, b), np.einsum("ij,ij->i", a, b))
        return np.mod(ang, TWO_PI)

    @cached_property
    def concave(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.angles > math.pi + ANGLE_TOL)[0])

    @property
    def is_convex(self) -> bool:
        return len(self.concave) == 0

    @cached_property
    def diag(self) -> float:
        return float(np.hypot(*(self.arr.max(0) - self.arr.min(0))))

    def vertex(self, i: int) -> Point:
        return self.vertices[i % self.n]

    def point_at(self, s: float) -> Point:
        """Boundary point at arclength s (taken modulo the perimeter)."""
        s = s % self.perimeter
        k = int(np.searchsorted(self.cum_length, s, side="right")) - 1
        k = min(max(k, 0), self.n - 1)
        ln = self.edge_lengths[k]
        t = 0.0 if ln == 0 else (s - self.cum_length[k]) / ln
        p = self.arr[k] + t * self.edge_vectors[k]
        return (float(p[0]), float(p[1]))

    def points_at(self, s: np.ndarray) -> np.ndarray:
        s = np.mod(np.asarray(s, float), self.perimeter)
        k = np.clip(np.searchsorted(self.cum_length, s, side="right") - 1, 0, self.n - 1)
        ln = self.edge_lengths[k]
        t = np.where(ln > 0, (s - self.cum_length[k]) / np.where(ln > 0, ln, 1.0), 0.0)
        return self.arr[k] + t[:, None] * self.edge_vectors[k]

    def locate(self, p, eps: float | None = None):
        """('vertex', j), ('edge', k, t) for a boundary point, else None."""
        eps = self.eps if eps is None else eps
        p = np.asarray(p, float)
        dv = np.hypot(*(self.arr - p).T)
        j = int(np.argmin(dv))
        if dv[j] <= eps:
            return ("vertex", j)
        e = self.edge_vectors
        ln2 = np.maximum(self.edge_lengths**2, 1e-300)
        t = np.clip(np.einsum("ij,ij->i", p - self.arr, e) / ln2, 0.0, 1.0)
        d = np.hypot(*(self.arr + t[:, None] * e - p).T)
        k = int(np.argmin(d))
        if d[k] <= eps:
            return ("edge", k, float(t[k]))
        return None

    def arclength_of(self, p) -> float:
        """Arclength position of a boundary point; raises if p is not on the boundary."""
        loc = self.locate(p)
        if loc is None:
            raise SegmentNotInPolygon("point is not on the boundary", step="arclength_of")
        if loc[0] == "vertex":
            return float(self.cum_length[loc[1]])
        return float(self.cum_length[loc[1]] + loc[2] * self.edge_lengths[loc[1]])

    def transformed(self, rot: float = 0.0, scale: float = 1.0, shift=(0.0, 0.0)) -> "Polygon":
        c, s = math.cos(rot), math.sin(rot)
        m = np.array([[c, -s], [s, c]]) * scale
        pts = self.arr @ m.T + np.asarray(shift, float)
        return Polygon.trusted(pts)

    def to_json(self) -> dict:
        return {"vertices": [[x, y] for x, y in self.vertices]}


# ---------------------------------------------------------------------------
# validation


def _collapse_duplicates(pts: np.ndarray, eps: float) -> np.ndarray:
    keep = [pts[0]]
    for p in pts[1:]:
        if np.hypot(*(p - keep[-1])) > eps:
            keep.append(p)
    while len(keep) > 1 and np.hypot(*(keep[-1] - keep[0])) <= eps:
        keep.pop()
    return np.array(keep)


def _check_simple(pts: np.ndarray, eps: float) -> None:
    n = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0)
    # a vertex sitting within eps of a non-incident edge is treated as a contact
    for i in range(n):
        e = b - a
        ln2 = np.maximum(np.einsum("ij,ij->i", e, e), 1e-300)
        t = np.clip(np.einsum("ij,ij->i", pts[i] - a, e) / ln2, 0, 1)
        d = np.hypot(*(a + t[:, None] * e - pts[i]).T)
        d[i] = np.inf
        d[(i - 1) % n] = np.inf
        if np.any(d <= eps):
            raise SelfIntersecting(f"vertex {i} touches a non-incident edge", step="validate_polygon")
    chunk = max(1, 400_000 // n)
    idx = np.arange(n)
    for start in range(0, n, chunk):
        I = idx[start : start + chunk]
        o1 = orient2d_many(a[I][:, None], b[I][:, None], a[None])
        o2 = orient2d_many(a[I][:, None], b[I][:, None], b[None])
        o3 = orient2d_many(a[None], b[None], a[I][:, None])
        o4 = orient2d_many(a[None], b[None], b[I][:, None])
        cross = (o1 * o2 < 0) & (o3 * o4 < 0)
        gap = np.abs(I[:, None] - idx[None])
        adj = (gap <= 1) | (gap == n - 1)
        cross &= ~adj
        if np.any(cross):
            i, j = np.argwhere(cross)[0]
            raise SelfIntersecting(f"edges {I[i]} and {j} cross", step="validate_polygon")
    # adjacent edges folding back onto each other
    for i in range(n):
        p, q, r = pts[i - 1], pts[i], pts[(i + 1) % n]
        if orient2d(p, q, r) == 0 and np.dot(q - p, r - q) < 0:
            raise SelfIntersecting(f"spike at vertex {i}", step="validate_polygon")


def validate_polygon(raw_vertices: Sequence[Point], tol: Tolerance | None = None) -> Polygon:
    pts = np.asarray(raw_vertices, float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise TooFewVertices("a polygon needs at least 3 vertices", step="validate_polygon")
    if not np.all(np.isfinite(pts)):
        raise SelfIntersecting("non-finite coordinate", step="validate_polygon")
    tol = tol or tolerance_for(pts)
    eps = tol.eps
    pts = _collapse_duplicates(pts, eps)
    if len(pts) < 3:
        raise TooFewVertices("fewer than 3 distinct vertices", step="validate_polygon")
    area = signed_area(pts)
    if abs(area) <= eps * eps and min_max_extent(pts)[0] <= eps:
        raise DegenerateArea("vertices are collinear", step="validate_polygon")
    _check_simple(pts, eps)
    if abs(area) <= eps * eps:
        raise DegenerateArea("polygon area is below tolerance", step="validate_polygon")
    if area < 0:
        pts = pts[::-1].copy()
    P = Polygon(tuple((float(x), float(y)) for x, y in pts), eps)
    # populate caches
    P.angles, P.concave, P.perimeter  # noqa: B018
    return P


# ---------------------------------------------------------------------------
# point and segment containment


SHAPELY_DISTANCE_MIN_N = 16


def _chunks(n_rows: int, n_cols: int, budget: int = 2_000_000):
    step = max(1, budget // max(n_cols, 1))
    for s in range(0, n_rows, step):
        yield slice(s, min(n_rows, s + step))


def boundary_distance(P: Polygon, pts) -> np.ndarray:
    """Euclidean distance from each point to the polygon boundary."""
    pts = np.atleast_2d(np.asarray(pts, float))
    if P.n >= SHAPELY_DISTANCE_MIN_N:
        return shapely.distance(shapely.points(pts), P.ring_geometry)
    a = P.arr
    e = P.edge_vectors
    ln2 = np.maximum(P.edge_lengths**2, 1e-300)
    out = np.empty(len(pts))
    for sl in _chunks(len(pts), P.n):
        q = pts[sl]
        rel = q[:, None, :] - a[None]
        t = np.clip(np.einsum("ijk,jk->ij", rel, e) / ln2, 0.0, 1.0)
        d = rel - t[..., None] * e[None]
        out[sl] = np.sqrt(np.min(np.einsum("ijk,ijk->ij", d, d), axis=1))
    return out


def points_in_polygon(P: Polygon, pts, eps: float | None = None):
    """(inside_closed, on_boundary) boolean arrays."""
    eps = P.eps if eps is None else eps
    pts = np.atleast_2d(np.asarray(pts, float))
    on = boundary_distance(P, pts) <= eps
    a = P.arr
    b = np.roll(a, -1, axis=0)
    odd = np.zeros(len(pts), bool)
    for sl in _chunks(len(pts), P.n):
        px = pts[sl, 0][:, None]
        py = pts[sl, 1][:, None]
        cond = (a[None, :, 1] > py) != (b[None, :, 1] > py)
        dy = b[:, 1] - a[:, 1]
        dy = np.where(dy == 0, 1.0, dy)
        xint = a[None, :, 0] + (py - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / dy[None]
        odd[sl] = (np.count_nonzero(cond & (px < xint), axis=1) % 2) == 1
    return on | odd, on


def point_in_polygon(P: Polygon, p) -> bool:
    return bool(points_in_polygon(P, [p])[0][0])


def segment_in_polygon(P: Polygon, s) -> bool:
    """True iff the closed segment lies in the closed polygon.

    Proper crossings are decided with exact orientation signs; contact points
    (within eps) split the segment into gaps whose midpoints are tested.
    """
    a, b = np.asarray(s[0], float), np.asarray(s[1], float)
    eps = P.eps
    d = b - a
    L = float(np.hypot(*d))
    inside, _ = points_in_polygon(P, [a, b])
    if not inside.all():
        return False
    if L <= eps:
        return True
    u = d / L
    params = [0.0, 1.0]
    verts = P.arr
    for k in range(P.n):
        p, q = verts[k], verts[(k + 1) % P.n]
        # contact points within tolerance
        touching = False
        for r in (p, q):
            rel = r - a
            if abs(u[0] * rel[1] - u[1] * rel[0]) <= eps:
                t = float(np.dot(rel, u)) / L
                if -eps / L <= t <= 1 + eps / L:
                    params.append(min(max(t, 0.0), 1.0))
                    touching = True
        e = q - p
        le = float(np.hypot(*e))
        for r, t in ((a, 0.0), (b, 1.0)):
            rel = r - p
            if le > 0 and abs(e[0] * rel[1] - e[1] * rel[0]) / le <= eps and -eps <= np.dot(rel, e) / le <= le + eps:
                touching = True
        if not touching and segments_cross_properly(a, b, p, q):
            return False
    ts = np.unique(np.asarray(params))
    mids = a + ((ts[:-1] + ts[1:]) / 2.0)[:, None] * d
    if len(mids) == 0:
        return True
    return bool(points_in_polygon(P, mids)[0].all())


def _in_cone(P: Polygon, j: np.ndarray, dirs: np.ndarray, atol: np.ndarray) -> np.ndarray:
    """Direction dirs[k] lies in the closed interior cone at vertex j[k]."""
    v = P.arr
    nxt = v[(j + 1) % P.n] - v[j]
    phi = np.mod(np.arctan2(_cross(nxt, dirs), np.einsum("ij,ij->i", nxt, dirs)), TWO_PI)
    return (phi <= P.angles[j] + atol) | (phi >= TWO_PI - atol)


def _classify_points(P: Polygon, X: np.ndarray, eps: float):
    """Per point: vertex index (or -1), edge index (or -1), inside-closed flag."""
    vidx = np.full(len(X), -1)
    eidx = np.full(len(X), -1)
    a = P.arr
    e = P.edge_vectors
    ln2 = np.maximum(P.edge_lengths**2, 1e-300)
    for sl in _chunks(len(X), P.n):
        q = X[sl]
        dv = np.hypot(q[:, None, 0] - a[None, :, 0], q[:, None, 1] - a[None, :, 1])
        jv = np.argmin(dv, axis=1)
        hit_v = dv[np.arange(len(q)), jv] <= eps
        rel = q[:, None, :] - a[None]
        t = np.clip(np.einsum("ijk,jk->ij", rel, e) / ln2, 0.0, 1.0)
        dd = rel - t[..., None] * e[None]
        de = np.sqrt(np.einsum("ijk,ijk->ij", dd, dd))
        je = np.argmin(de, axis=1)
        hit_e = (de[np.arange(len(q)), je] <= eps) & ~hit_v
        vidx[sl] = np.where(hit_v, jv, -1)
        eidx[sl] = np.where(hit_e, je, -1)
    inside = np.ones(len(X), bool)
    free = (vidx < 0) & (eidx < 0)
    if free.any():
        inside[free] = points_in_polygon(P, X[free], eps)[0]
    return vidx, eidx, inside


def segments_in_polygon(P: Polygon, A, B, eps: float | None = None):
    """Batched containment of segments [A_k;B_k] in the closed polygon.

    Returns (inside, touches): touches flags segments whose open interior meets
    the boundary (a vertex within eps of the open segment).
    """
    eps = P.eps if eps is None else eps
    A = np.atleast_2d(np.asarray(A, float))
    B = np.atleast_2d(np.asarray(B, float))
    A, B = np.broadcast_arrays(A, B)
    N = len(A)
    D = B - A
    L = np.hypot(D[:, 0], D[:, 1])
    Ls = np.where(L > 0, L, 1.0)
    V = P.arr
    E = P.edge_vectors
    El = np.where(P.edge_lengths > 0, P.edge_lengths, 1.0)
    inside = np.ones(N, bool)
    touches = np.zeros(N, bool)
    atol = ANGLE_TOL + eps / Ls

    for sl in _chunks(N, P.n, 1_000_000):
        a, d, l, ls = A[sl], D[sl], L[sl], Ls[sl]
        relx = V[None, :, 0] - a[:, None, 0]
        rely = V[None, :, 1] - a[:, None, 1]
        sd = (d[:, 0, None] * rely - d[:, 1, None] * relx) / ls[:, None]
        tau = (d[:, 0, None] * relx + d[:, 1, None] * rely) / ls[:, None]
        sd1 = np.roll(sd, -1, axis=1)
        ea = (E[None, :, 0] * (-rely) - E[None, :, 1] * (-relx)) / El[None]
        bx = relx - d[:, 0, None]
        by = rely - d[:, 1, None]
        eb = (E[None, :, 0] * (-by) - E[None, :, 1] * (-bx)) / El[None]
        proper = (((sd > eps) & (sd1 < -eps)) | ((sd < -eps) & (sd1 > eps))) & (
            ((ea > eps) & (eb < -eps)) | ((ea < -eps) & (eb > eps))
        )
        inside[sl] &= ~proper.any(axis=1)
        onseg = (np.abs(sd) <= eps) & (tau > eps) & (tau < l[:, None] - eps)
        touches[sl] |= onseg.any(axis=1)
        ii, jj = np.nonzero(onseg)
        if len(ii):
            gi = ii + sl.start
            dirs = D[gi]
            ok = _in_cone(P, jj, dirs, atol[gi]) & _in_cone(P, jj, -dirs, atol[gi])
            bad = np.zeros(N, bool)
            bad[gi[~ok]] = True
            inside &= ~bad

    for X, sign in ((A, 1.0), (B, -1.0)):
        vidx, eidx, ins = _classify_points(P, X, eps)
        inside &= ins
        dirs = sign * D
        m = (vidx >= 0) & (L > eps)
        if m.any():
            inside[m] &= _in_cone(P, vidx[m], dirs[m], atol[m])
        m = (eidx >= 0) & (L > eps)
        if m.any():
            e = E[eidx[m]]
            cr = _cross(e, dirs[m]) / (El[eidx[m]] * Ls[m])
            inside[m] &= cr >= -atol[m]
    short = L <= eps
    touches &= ~short
    return inside, touches


# ---------------------------------------------------------------------------
# cigars, carrots, visible regions


def _check_eta(eta: float) -> None:
    if not (0.0 < eta < 1.0):
        raise InvalidEta(f"eta must lie in (0,1), got {eta}", step="membership")


def _min_dist_minus_linear(s: float, h: float, lo: float, hi: float, c0: float, c1: float) -> float:
    """min over t in [lo,hi] of sqrt((s-t)^2 + h^2) - (c0 + c1 t), with |c1| < 1 (convex)."""
    if hi < lo:
        return math.inf
    t = s + c1 * h / math.sqrt(1.0 - c1 * c1)
    t = min(max(t, lo), hi)
    return math.hypot(s - t, h) - (c0 + c1 * t)


def cigar_margin(a, b, eta: float, x) -> float:
    """min_t |x - g(t)| - eta*min(t, l-t); negative iff x is in the open cigar."""
    _check_eta(eta)
    ax, ay = float(a[0]), float(a[1])
    dx, dy = float(b[0]) - ax, float(b[1]) - ay
    l = math.hypot(dx, dy)
    if l == 0:
        raise InvalidEta("degenerate segment", step="cigar")
    ux, uy = dx / l, dy / l
    rx, ry = float(x[0]) - ax, float(x[1]) - ay
    s = rx * ux + ry * uy
    h = abs(ux * ry - uy * rx)
    m1 = _min_dist_minus_linear(s, h, 0.0, l / 2, 0.0, eta)
    m2 = _min_dist_minus_linear(s, h, l / 2, l, eta * l, -eta)
    return min(m1, m2)


def cigar_membership(a, b, eta: float, x) -> bool:
    return cigar_margin(a, b, eta, x) < 0.0


def carrot_margin(curve, eta: float, x) -> float:
    """min_t |x - g(t)| - eta*t over an arclength-parametrised polyline."""
    _check_eta(eta)
    pts = np.asarray(curve, float)
    if pts.ndim != 2 or len(pts) < 2:
        raise EmptyCurve("curve needs at least two points", step="carrot")
    seg = np.diff(pts, axis=0)
    lens = np.hypot(seg[:, 0], seg[:, 1])
    if lens.sum() == 0:
        raise EmptyCurve("curve has zero length", step="carrot")
    best = math.inf
    T = 0.0
    for p, d, l in zip(pts[:-1], seg, lens):
        if l == 0:
            continue
        ux, uy = d / l
        rx, ry = float(x[0]) - p[0], float(x[1]) - p[1]
        s = rx * ux + ry * uy
        h = abs(ux * ry - uy * rx)
        best = min(best, _min_dist_minus_linear(s, h, 0.0, l, eta * T, eta))
        T += l
    return best


def carrot_membership(curve, eta: float, x) -> bool:
    return carrot_margin(curve, eta, x) < 0.0


def visible_region_membership(P: Polygon, vw, eta: float, x, n_candidates: int = VISIBILITY_CANDIDATES) -> bool:
    v, w = np.asarray(vw[0], float), np.asarray(vw[1], float)
    if not segment_in_polygon(P, (v, w)):
        raise SegmentNotInPolygon("[v;w] is not contained in P", step="visible_region")
    return bool(visible_from_chord(P, v, w, eta, np.atleast_2d(np.asarray(x, float)), n_candidates)[0])


def visible_from_chord(P: Polygon, v, w, eta: float, X: np.ndarray, n_candidates: int = VISIBILITY_CANDIDATES) -> np.ndarray:
    """Batched visible-region test for points X (chord containment is assumed)."""
    v, w = np.asarray(v, float), np.asarray(w, float)
    out = np.zeros(len(X), bool)
    d = w - v
    l2 = float(d @ d)
    base = v + np.linspace(0.0, 1.0, max(n_candidates, 2))[:, None] * d
    for k, x in enumerate(X):
        if cigar_margin(v, w, eta, x) > P.eps:
            continue
        t = min(max(float((x - v) @ d) / l2, 0.0), 1.0)
        cand = np.vstack([v + t * d, v, w, base])
        ins, _ = segments_in_polygon(P, cand, np.broadcast_to(x, cand.shape))
        out[k] = bool(ins.any())
    return out


# ---------------------------------------------------------------------------
# hulls and extents


def convex_hull(points) -> np.ndarray:
    """Andrew's monotone chain; CCW, no collinear points."""
    pts = np.unique(np.asarray(points, float), axis=0)
    if len(pts) <= 2:
        return pts

    def half(seq):
        h = []
        for p in seq:
            while len(h) >= 2 and orient2d(h[-2], h[-1], p) <= 0:
                h.pop()
            h.append(p)
        return h

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def directional_extent(P, angle: float) -> float:
    pts = P.arr if isinstance(P, Polygon) else np.asarray(P, float)
    proj = pts @ np.array([math.cos(angle), math.sin(angle)])
    return float(proj.max() - proj.min())


def min_max_extent(P) -> tuple[float, float, float]:
    """(width, diameter, angle) where projecting onto angle realises the width."""
    pts = P.arr if isinstance(P, Polygon) else np.asarray(P, float)
    h = convex_hull(pts)
    diff = h[:, None, :] - h[None, :, :]
    diam = float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff))))
    e = np.roll(h, -1, axis=0) - h
    el = np.hypot(e[:, 0], e[:, 1])
    normals = np.stack([-e[:, 1], e[:, 0]], axis=1) / el[:, None]
    proj = h @ normals.T
    widths = proj.max(0) - proj.min(0)
    k = int(np.argmin(widths))
    ang = math.atan2(normals[k, 1], normals[k, 0]) % math.pi
    return float(widths[k]), diam, ang


def rotate_points(pts, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.asarray(pts, float) @ np.array([[c, s], [-s, c]])
