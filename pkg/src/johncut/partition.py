"""Chord splits, side selection, partitions and the boundary-length ledger."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChordExitsPolygon, ChordOnBoundary, ChordTouchesBoundaryInternally, NotAdjacent
from .geom import Point, Polygon, boundary_distance, segments_in_polygon

BOTH_AREA_RTOL = 1e-9


@dataclass(frozen=True)
class Chord:
    v: Point
    w: Point

    @property
    def length(self) -> float:
        return math.hypot(self.w[0] - self.v[0], self.w[1] - self.v[1])

    def to_json(self) -> list:
        return [list(self.v), list(self.w), self.length]


@dataclass(frozen=True)
class SplitResult:
    q1: Polygon  # boundary of P traversed from v to w, closed by the chord
    q2: Polygon  # boundary from w to v
    chord: Chord
    n1: int
    n2: int


def _snap(P: Polygon, loc):
    if loc is None or loc[0] == "vertex":
        return loc
    _, k, t = loc
    ln = P.edge_lengths[k]
    if t * ln <= P.eps:
        return ("vertex", k)
    if (1 - t) * ln <= P.eps:
        return ("vertex", (k + 1) % P.n)
    return loc


def _insert(P: Polygon, loc_v, loc_w, v, w):
    """Ring with v and w present as vertices, plus their ring positions and the old->new index map."""
    ring = list(P.vertices)
    old = list(range(P.n))
    inserts = []
    for loc, pt in ((loc_v, v), (loc_w, w)):
        if loc[0] == "edge":
            inserts.append((loc[1], loc[2], tuple(map(float, pt))))
    inserts.sort(key=lambda it: (it[0], it[1]), reverse=True)
    for k, _, pt in inserts:
        ring.insert(k + 1, pt)
        old.insert(k + 1, -1)

    def position(loc, pt):
        if loc[0] == "vertex":
            return old.index(loc[1])
        return ring.index(tuple(map(float, pt)))

    return ring, position(loc_v, v), position(loc_w, w), old


def split_at(P: Polygon, loc_v, loc_w, v, w) -> SplitResult:
    """Split along a chord already known to be valid (no containment checks)."""
    ring, iv, iw, old = _insert(P, loc_v, loc_w, v, w)
    m = len(ring)
    r1 = [ring[(iv + i) % m] for i in range(((iw - iv) % m) + 1)]
    r2 = [ring[(iw + i) % m] for i in range(((iv - iw) % m) + 1)]
    skip = {loc[1] for loc in (loc_v, loc_w) if loc[0] == "vertex"}
    side1 = {old[(iv + i) % m] for i in range(1, (iw - iv) % m)}
    n1 = sum(1 for c in P.concave if c in side1 and c not in skip)
    n2 = sum(1 for c in P.concave if c not in side1 and c not in skip)
    chord = Chord(tuple(map(float, ring[iv])), tuple(map(float, ring[iw])))
    return SplitResult(Polygon.trusted(r1, P.eps), Polygon.trusted(r2, P.eps), chord, n1, n2)


def chord_on_boundary(P: Polygon, v, w) -> bool:
    v, w = np.asarray(v, float), np.asarray(w, float)
    ts = np.linspace(0.1, 0.9, 9)
    return bool(np.all(boundary_distance(P, v + ts[:, None] * (w - v)) <= P.eps))


def split_by_chord(P: Polygon, v, w) -> SplitResult:
    loc_v = _snap(P, P.locate(v))
    loc_w = _snap(P, P.locate(w))
    if loc_v is None or loc_w is None:
        raise ChordExitsPolygon("chord endpoint is not on the boundary", step="split_by_chord")
    v = P.vertices[loc_v[1]] if loc_v[0] == "vertex" else tuple(map(float, v))
    w = P.vertices[loc_w[1]] if loc_w[0] == "vertex" else tuple(map(float, w))
    if math.hypot(w[0] - v[0], w[1] - v[1]) <= P.eps:
        raise ChordOnBoundary("chord endpoints coincide", step="split_by_chord")
    if chord_on_boundary(P, v, w):
        raise ChordOnBoundary("chord lies along the boundary", step="split_by_chord")
    inside, touches = segments_in_polygon(P, [v], [w])
    if not inside[0]:
        raise ChordExitsPolygon("chord leaves the polygon", step="split_by_chord")
    if touches[0]:
        raise ChordTouchesBoundaryInternally("chord meets the boundary in its interior", step="split_by_chord")
    sr = split_at(P, loc_v, loc_w, v, w)
    if sr.q1.signed_area <= P.eps**2 or sr.q2.signed_area <= P.eps**2:
        raise ChordExitsPolygon("split produced a degenerate piece", step="split_by_chord")
    return sr


def select_Qvw(sr: SplitResult) -> str:
    """'Q1', 'Q2' or 'Both' by concave count, then area."""
    if sr.n1 != sr.n2:
        return "Q1" if sr.n1 < sr.n2 else "Q2"
    a1, a2 = sr.q1.area, sr.q2.area
    if abs(a1 - a2) <= BOTH_AREA_RTOL * max(a1, a2):
        return "Both"
    return "Q1" if a1 < a2 else "Q2"


@dataclass(frozen=True)
class Partition:
    source: Polygon
    pieces: tuple[Polygon, ...]
    exceptional: tuple[Polygon, ...] = ()
    cuts: tuple[Chord, ...] = ()
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def boundary_total(self) -> float:
        """Sum of piece perimeters, exceptional pieces excluded."""
        return float(sum(p.perimeter for p in self.pieces))

    @property
    def boundary_total_all(self) -> float:
        return self.boundary_total + float(sum(p.perimeter for p in self.exceptional))

    @property
    def cut_total(self) -> float:
        return float(sum(c.length for c in self.cuts))

    @property
    def exceptional_boundary(self) -> float:
        return float(sum(p.perimeter for p in self.exceptional))

    def identity_residual(self) -> float:
        """Relative error of sum(perimeters) = perimeter(P) + 2 * sum(cuts)."""
        lhs = self.boundary_total_all
        rhs = self.source.perimeter + 2.0 * self.cut_total
        return abs(lhs - rhs) / self.source.perimeter

    def area_residual(self) -> float:
        tot = sum(p.area for p in self.pieces) + sum(p.area for p in self.exceptional)
        return abs(tot - self.source.area) / self.source.area


def ledger_check(part: Partition, theta: float) -> tuple[bool, float]:
    H = part.source.perimeter
    slack = (1.0 + theta) * H - part.boundary_total
    return slack >= -1e-9 * H, float(slack)


# ---------------------------------------------------------------------------
# ring splicing


def _with_contacts(ring: list, other: np.ndarray, eps: float) -> list:
    """Insert points of `other` that lie in the interior of edges of `ring`."""
    out = []
    n = len(ring)
    for i in range(n):
        a = np.asarray(ring[i], float)
        b = np.asarray(ring[(i + 1) % n], float)
        out.append(ring[i])
        e = b - a
        l2 = float(e @ e)
        if l2 == 0:
            continue
        t = (other - a) @ e / l2
        foot = a + t[:, None] * e
        d = np.hypot(*(other - foot).T)
        ok = (d <= eps) & (t * math.sqrt(l2) > eps) & ((1 - t) * math.sqrt(l2) > eps)
        for k in np.argsort(t):
            if ok[k]:
                out.append(tuple(map(float, other[k])))
    return out


def shared_boundary(P: Polygon, Q: Polygon, eps: float | None = None):
    """Contact data: P ring and Q ring (with mutual contact points inserted) and the
    list of P-edges (i, i+1) that Q traverses in reverse."""
    eps = P.eps if eps is None else eps
    rp = _with_contacts(list(P.vertices), Q.arr, eps)
    rq = _with_contacts(list(Q.vertices), P.arr, eps)
    ap, aq = np.asarray(rp), np.asarray(rq)
    match = {}
    for i, p in enumerate(ap):
        d = np.hypot(*(aq - p).T)
        j = int(np.argmin(d))
        if d[j] <= eps:
            match[i] = j
    m, k = len(rp), len(rq)
    shared = []
    for i in range(m):
        j0, j1 = match.get(i), match.get((i + 1) % m)
        if j0 is not None and j1 is not None and (j0 - 1) % k == j1:
            shared.append(i)
    return rp, rq, match, shared


def shared_length(P: Polygon, Q: Polygon, eps: float | None = None) -> float:
    rp, _, _, shared = shared_boundary(P, Q, eps)
    a = np.asarray(rp)
    return float(sum(np.hypot(*(a[(i + 1) % len(a)] - a[i])) for i in shared))


def merge_polygons(P: Polygon, Q: Polygon, eps: float | None = None, drop_straight: bool = False) -> Polygon:
    """Union of two polygons sharing one contiguous boundary path, by ring splicing."""
    eps = P.eps if eps is None else eps
    rp, rq, match, shared = shared_boundary(P, Q, eps)
    if not shared:
        raise NotAdjacent("polygons share no boundary edge", step="merge")
    m, k = len(rp), len(rq)
    sset = set(shared)
    # start of the shared run: a shared edge whose predecessor is not shared
    starts = [i for i in shared if (i - 1) % m not in sset]
    if len(starts) != 1:
        if len(shared) == m:
            raise NotAdjacent("polygons coincide", step="merge")
        raise NotAdjacent("shared boundary is not a single contiguous path", step="merge")
    s = starts[0]
    e = s
    while e in sset:
        e = (e + 1) % m
    # shared path runs P[s] .. P[e]; keep P from e forward to s, then Q between
    ring = []
    i = e
    while True:
        ring.append(rp[i])
        if i == s:
            break
        i = (i + 1) % m
    qs, qe = match[s], match[e]
    j = (qs + 1) % k
    while j != qe:
        ring.append(rq[j])
        j = (j + 1) % k
    out = Polygon.trusted(ring, P.eps)
    if drop_straight:
        out = drop_straight_vertices(out)
    return out


def drop_straight_vertices(P: Polygon, tol: float = 1e-9) -> Polygon:
    keep = [i for i, a in enumerate(P.angles) if abs(a - math.pi) > tol]
    return Polygon.trusted([P.vertices[i] for i in keep], P.eps)
