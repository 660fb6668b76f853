"""Densely sampled smooth or Lipschitz domains: hole slitting, boundary squares, merge-back."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LineString, LinearRing, box
from shapely.geometry import Polygon as SPolygon
from shapely.ops import nearest_points, unary_union

from .errors import FrameConstructionFailed, JohnCutError, NotAdjacent, SlitPlacementFailed, TooManyHoles
from .geom import Polygon, Segment, min_max_extent, signed_area, validate_polygon
from .john import certify_john, john_constant
from .partition import merge_polygons, shared_length
from .pipeline import PipelineConfig, decompose_polygon
from .rotund import inscribed_disk

TANGENT_LIMIT = math.pi / 8
ANGLE_FLOOR = math.pi / 4
MAX_ROUNDS = 8
SPACING_FACTOR = 8
GRID_SHIFT = (0.3819660112501051, 0.2360679774997897)  # irrational offsets keep grid lines off fixtures


def _ring(points) -> np.ndarray:
    a = np.asarray(points, float)
    if len(a) > 1 and np.allclose(a[0], a[-1]):
        a = a[:-1]
    return a


def ring_length(ring: np.ndarray) -> float:
    return float(np.hypot(*(np.roll(ring, -1, axis=0) - ring).T).sum())


def ring_spacing(ring: np.ndarray) -> float:
    return float(np.hypot(*(np.roll(ring, -1, axis=0) - ring).T).max())


def ring_tangents(ring: np.ndarray) -> np.ndarray:
    """Unit tangents by centred differences."""
    d = np.roll(ring, -1, axis=0) - np.roll(ring, 1, axis=0)
    return d / np.hypot(*d.T)[:, None]


@dataclass(frozen=True)
class DomainInput:
    outer: np.ndarray
    holes: tuple[np.ndarray, ...] = ()
    spacing: float | None = None

    def __post_init__(self):
        outer = _ring(self.outer)
        if signed_area(outer) < 0:
            outer = outer[::-1].copy()
        holes = []
        for h in self.holes:
            h = _ring(h)
            if signed_area(h) > 0:
                h = h[::-1].copy()
            holes.append(h)
        for r in [outer, *holes]:
            if len(r) < 3 or not LinearRing(r).is_simple:
                raise ValueError("domain rings must be simple closed polylines")
        shell = SPolygon(outer)
        for i, h in enumerate(holes):
            hp = SPolygon(h)
            if not shell.contains(hp):
                raise ValueError("every hole must lie inside the outer ring")
            if any(hp.intersects(SPolygon(g)) for g in holes[:i]):
                raise ValueError("holes must be disjoint")
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", tuple(holes))
        if self.spacing is None:
            object.__setattr__(self, "spacing", max(ring_spacing(r) for r in [outer, *holes]))

    @classmethod
    def from_json(cls, data: dict) -> "DomainInput":
        return cls(np.asarray(data["outer"], float), tuple(np.asarray(h, float) for h in data.get("holes", [])),
                   data.get("spacing"))

    def to_json(self) -> dict:
        return {"outer": self.outer.tolist(), "holes": [h.tolist() for h in self.holes], "spacing": self.spacing}

    @property
    def perimeter(self) -> float:
        """H1 of the whole boundary, holes included."""
        return ring_length(self.outer) + sum(ring_length(h) for h in self.holes)

    @property
    def area(self) -> float:
        return signed_area(self.outer) + sum(signed_area(h) for h in self.holes)

    @property
    def tangents(self) -> np.ndarray:
        return ring_tangents(self.outer)

    def shapely(self) -> SPolygon:
        return SPolygon(self.outer, [h for h in self.holes])


# ---------------------------------------------------------------------------
# holes


@dataclass(frozen=True)
class SlitLedger:
    slits: tuple[Segment, ...] = ()
    s: float | None = None
    n_squares: int = 0
    removed_area: float = 0.0

    @property
    def slit_total(self) -> float:
        return float(sum(g.length for g in self.slits))


def _nudge(point: np.ndarray, ring: np.ndarray, step: float) -> np.ndarray:
    """Move a point that sits on a ring vertex a little along the next edge."""
    d = np.hypot(*(ring - point).T)
    k = int(np.argmin(d))
    if d[k] > step:
        return point
    e = ring[(k + 1) % len(ring)] - ring[k]
    return ring[k] + step * e / np.hypot(*e)


def _place_slits(inp: DomainInput) -> list[Segment]:
    outer = LinearRing(inp.outer)
    holes = [SPolygon(h) for h in inp.holes]
    eps = 1e-9 * math.hypot(*np.ptp(inp.outer, axis=0))
    slits = []
    for i, h in enumerate(inp.holes):
        targets = [("outer", outer)] + [(j, LinearRing(inp.holes[j])) for j in range(i)]
        placed = None
        for _, tgt in targets:
            a, b = nearest_points(LinearRing(h), tgt)
            a = _nudge(np.array(a.coords[0]), h, 10 * eps)
            b = _nudge(np.array(b.coords[0]), np.asarray(tgt.coords)[:-1], 10 * eps)
            seg = LineString([a, b])
            others = [holes[j] for j in range(len(holes)) if j != i]
            if any(seg.crosses(o) or seg.within(o) for o in others):
                continue
            placed = Segment(tuple(map(float, a)), tuple(map(float, b)))
            break
        if placed is None:
            raise SlitPlacementFailed(f"no clear slit for hole {i}", step="saturate_and_slit")
        slits.append(placed)
    return slits


def _cells_along(lines, s: float, shift) -> set[tuple[int, int]]:
    cells = set()
    for ln in lines:
        ln = np.asarray(ln, float)
        for a, b in zip(ln[:-1], ln[1:]):
            m = max(2, int(math.ceil(np.hypot(*(b - a)) / (s / 16))) + 1)
            pts = a + np.linspace(0, 1, m)[:, None] * (b - a)
            ij = np.floor((pts - shift) / s).astype(int)
            cells.update(map(tuple, ij.tolist()))
    return cells


def _to_polygon(g: SPolygon) -> Polygon:
    # the union of grid cells carries every cell corner; drop the collinear ones first
    g = shapely.normalize(g.simplify(0))
    return validate_polygon(np.asarray(g.exterior.coords)[:-1])


def saturate_and_slit(inp: DomainInput, max_holes: int = 4, epsilon: float | None = None, s: float | None = None):
    """Simply connected pieces of a multiply connected domain plus the slit ledger.

    Each hole is joined to the outer ring (or an earlier hole) by a short slit, and
    grid squares of side s covering the boundary and slits are removed. s halves
    until the removed area is at most epsilon."""
    if not inp.holes:
        return [validate_polygon(inp.outer)], SlitLedger()
    if len(inp.holes) > max_holes:
        raise TooManyHoles(f"{len(inp.holes)} holes, at most {max_holes} allowed", step="saturate_and_slit")
    slits = _place_slits(inp)
    dom = inp.shapely()
    eps_area = 0.01 * dom.area if epsilon is None else epsilon
    diam = min_max_extent(validate_polygon(inp.outer))[1]
    s = diam / 64 if s is None else s
    lines = [np.vstack([r, r[:1]]) for r in [inp.outer, *inp.holes]] + [np.array([g.a, g.b]) for g in slits]
    for _ in range(MAX_ROUNDS):
        shift = np.array(GRID_SHIFT) * s
        cells = sorted(_cells_along(lines, s, shift))
        boxes = [box(shift[0] + i * s, shift[1] + j * s, shift[0] + (i + 1) * s, shift[1] + (j + 1) * s) for i, j in cells]
        removed = unary_union(boxes)
        rest = dom.difference(removed)
        parts = [g for g in getattr(rest, "geoms", [rest]) if not g.is_empty and g.area > 0]
        removed_area = dom.area - sum(g.area for g in parts)
        if removed_area <= eps_area:
            break
        s /= 2
    else:
        raise SlitPlacementFailed("removed area stays above epsilon", step="saturate_and_slit")
    parts = sorted(parts, key=lambda g: (-g.area, g.centroid.x, g.centroid.y))
    if any(len(g.interiors) for g in parts):
        raise SlitPlacementFailed("a component still has a hole", step="saturate_and_slit")
    pieces = [_to_polygon(g) for g in parts]
    return pieces, SlitLedger(tuple(slits), s, len(cells), float(removed_area))


# ---------------------------------------------------------------------------
# boundary squares


def _square(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """CCW square with diagonal [a;b]; corner 3 is on the left (inner) side."""
    m, h = (a + b) / 2, (b - a) / 2
    r = np.array([-h[1], h[0]])
    return np.array([a, m - r, b, m + r])


def _angle_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.abs(np.arctan2(u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0], (u * v).sum(-1)))


@dataclass
class BoundaryFrame:
    ring: np.ndarray
    anchors: tuple[int, ...]
    squares: tuple[np.ndarray, ...]
    interior: Polygon
    outer_pieces: tuple[Polygon, ...]
    d: float
    d_max: float
    d_target: float
    rounds: int
    checks: dict = field(default_factory=dict)

    @property
    def points(self) -> np.ndarray:
        return self.ring[list(self.anchors)]

    @property
    def n(self) -> int:
        return len(self.anchors)

    def invariants(self) -> dict:
        return dict(self.checks)

    def assert_invariants(self) -> None:
        bad = [k for k, v in self.checks.items() if not v]
        if bad:
            raise FrameConstructionFailed(f"frame invariants violated: {', '.join(bad)}", step="boundary_frame")

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "d_max": self.d_max, "d_target": self.d_target, "rounds": self.rounds,
                "checks": self.checks, "anchors": self.points.tolist()}


def _arc(ring: np.ndarray, i: int, j: int) -> np.ndarray:
    n = len(ring)
    return ring[np.arange(i, j + 1) % n] if j >= i else ring[np.r_[np.arange(i, n), np.arange(0, j + 1)] % n]


def _tangent_ok(ring, tang, i: int, j: int) -> bool:
    n = len(ring)
    c = ring[j % n] - ring[i % n]
    L = np.hypot(*c)
    if L == 0:
        return False
    idx = np.arange(i, j + 1) % n
    return bool(_angle_between(tang[idx], np.broadcast_to(c / L, (len(idx), 2))).max() < TANGENT_LIMIT)


def _greedy(ring: np.ndarray, tang: np.ndarray, h: float) -> list[int] | None:
    n = len(ring)
    out = [0]
    i = 0
    while True:
        best = None
        j = i + 1
        while j <= n:
            if np.hypot(*(ring[j % n] - ring[i])) > h:
                break
            if _tangent_ok(ring, tang, i, j):
                best = j
            j += 1
        if best is None or best == i:
            return None
        if best >= n:
            return out
        # leave enough room for the closing chord
        out.append(best)
        i = best


def frame_checks(ring: np.ndarray, tang: np.ndarray, anchors: list[int], squares, interior_ring: np.ndarray) -> dict:
    n = len(anchors)
    P = ring[anchors]
    diag = np.hypot(*(np.roll(P, -1, axis=0) - P).T)
    d, dmax = float(diag.min()), float(diag.max())
    checks = {"diagonal_ratio": d >= 0.5 * dmax}
    sq = [SPolygon(q) for q in squares]
    touch = True
    for i in range(n):
        inter = sq[i].intersection(sq[(i + 1) % n])
        if inter.area > 0 or inter.length > 0 or inter.distance(shapely.Point(P[(i + 1) % n])) > 1e-12 * dmax:
            touch = False
            break
    checks["consecutive_touch"] = touch
    sep = True
    if n >= 4:
        for i in range(n):
            for k in range(2, n - 1):
                j = (i + k) % n
                if j < i:
                    continue
                if sq[i].distance(sq[j]) < d / 2 - 1e-12 * dmax:
                    sep = False
                    break
            if not sep:
                break
    checks["separation"] = sep
    tan_ok = True
    for i in range(n):
        a, b = anchors[i], anchors[(i + 1) % n]
        if not _tangent_ok(ring, tang, a, b if b > a else b + len(ring)):
            tan_ok = False
            break
    checks["tangent"] = tan_ok
    inside = True
    for i in range(n):
        a, b = anchors[i], anchors[(i + 1) % n]
        arc = _arc(ring, a, b)
        if not sq[i].buffer(1e-9 * dmax).covers(LineString(arc)):
            inside = False
            break
    checks["arc_in_square"] = inside
    try:
        Pi = validate_polygon(interior_ring)
        checks["interior_simple"] = True
        checks["interior_angles"] = bool(Pi.angles.min() >= ANGLE_FLOOR - 1e-12)
    except JohnCutError:
        checks["interior_simple"] = False
        checks["interior_angles"] = False
    return checks


def _build(ring, tang, anchors, d_target, rounds) -> BoundaryFrame:
    n = len(anchors)
    P = ring[anchors]
    squares = tuple(_square(P[i], P[(i + 1) % n]) for i in range(n))
    inner = np.array([q[3] for q in squares])
    iring = np.empty((2 * n, 2))
    iring[0::2] = P
    iring[1::2] = inner
    checks = frame_checks(ring, tang, anchors, squares, iring)
    diag = np.hypot(*(np.roll(P, -1, axis=0) - P).T)
    frame = BoundaryFrame(ring, tuple(anchors), squares, None, (), float(diag.min()), float(diag.max()), d_target,
                          rounds, checks)
    if all(checks.values()):
        frame.interior = validate_polygon(iring)
        outs = []
        for i in range(n):
            arc = _arc(ring, anchors[i], anchors[(i + 1) % n])
            outs.append(validate_polygon(np.vstack([arc, inner[i]])))
        frame.outer_pieces = tuple(outs)
    return frame


def boundary_frame(inp: DomainInput, d_target: float, max_rounds: int = MAX_ROUNDS, steps: int = 20) -> BoundaryFrame:
    """Anchor points on the boundary with squares on consecutive diagonals.

    Greedy placement at chord at most h, with h scanned down from d_target to
    d_target/2; if nothing satisfies the invariants d_target halves."""
    if inp.holes:
        raise FrameConstructionFailed("boundary frame needs a simply connected domain", step="boundary_frame")
    ring = inp.outer
    tang = ring_tangents(ring)
    spacing = ring_spacing(ring)
    last = None
    for rnd in range(max_rounds):
        if spacing > d_target / SPACING_FACTOR:
            raise FrameConstructionFailed(
                f"sampling spacing {spacing:.3g} too coarse for d_target {d_target:.3g}", step="boundary_frame")
        for k in range(steps):
            h = d_target * (1 - 0.5 * k / steps)
            anchors = _greedy(ring, tang, h)
            if anchors is None or len(anchors) < 4:
                continue
            frame = _build(ring, tang, anchors, d_target, rnd)
            last = frame
            if all(frame.checks.values()):
                return frame
        d_target /= 2
    detail = "" if last is None else ", ".join(k for k, v in last.checks.items() if not v)
    raise FrameConstructionFailed(f"no valid frame after {max_rounds} rounds ({detail})", step="boundary_frame")


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class DomainPartition:
    domain: DomainInput
    pieces: list[Polygon]
    cuts: list[Segment]
    certs: list = field(default_factory=list)
    rho: float = 0.0
    frame: BoundaryFrame | None = None
    slit_ledger: SlitLedger = field(default_factory=SlitLedger)
    meta: dict = field(default_factory=dict)

    @property
    def boundary_total(self) -> float:
        return float(sum(p.perimeter for p in self.pieces))

    @property
    def area_total(self) -> float:
        return float(sum(p.area for p in self.pieces))

    def ledger(self, theta: float) -> tuple[bool, float]:
        H = self.domain.perimeter
        slack = (1 + theta) * H - self.boundary_total
        return slack >= -1e-9 * H, float(slack)

    def area_residual(self) -> float:
        ref = self.domain.area
        return abs(self.area_total + self.slit_ledger.removed_area - ref) / ref


def _merge_into(pieces: list[Polygon], extra: Polygon) -> tuple[int, Polygon] | None:
    best, k = 0.0, None
    for i, q in enumerate(pieces):
        L = shared_length(q, extra)
        if L > best:
            best, k = L, i
    if k is None:
        return None
    try:
        return k, merge_polygons(pieces[k], extra)
    except NotAdjacent:
        return None


def decompose_domain(inp: DomainInput, theta: float = 0.5, epsilon: float | None = None, d_target: float | None = None,
                     eta: float = 0.05, n_points: int = 200, seed: int = 42, merge_factor: float = 0.25,
                     max_holes: int = 4) -> DomainPartition:
    H = inp.perimeter
    eps = 0.01 * H if epsilon is None else epsilon
    meta: dict = {"theta": theta, "epsilon": eps, "perimeter": H, "area": inp.area}
    frame = None
    cuts: list[Segment] = []
    consts: dict[int, float] = {}
    if inp.holes:
        parts, ledger = saturate_and_slit(inp, max_holes, eps)
        pieces = []
        for Q in parts:
            sub = decompose_polygon(Q, PipelineConfig(theta=theta, eta=eta, epsilon=eps * Q.perimeter / H))
            pieces.extend(sub.pieces)
            pieces.extend(sub.exceptional)
            cuts.extend(Segment(c.v, c.w) for c in sub.cuts)
    else:
        ledger = SlitLedger()
        d_target = ring_length(inp.outer) / 32 if d_target is None else d_target
        frame = boundary_frame(inp, d_target)
        frame.assert_invariants()
        sub = decompose_polygon(frame.interior, PipelineConfig(theta=theta, eta=eta, epsilon=eps))
        cuts.extend(Segment(c.v, c.w) for c in sub.cuts)
        pieces = list(sub.pieces)
        # sharp-angle trimmings go back to the piece they were cut from
        for tri in sub.exceptional:
            got = _merge_into(pieces, tri)
            if got is None:
                pieces.append(tri)
            else:
                pieces[got[0]] = got[1]
        base = list(pieces)
        received: dict[int, list[Polygon]] = {}
        for O in frame.outer_pieces:
            got = _merge_into(pieces, O)
            if got is None:
                pieces.append(O)
                continue
            pieces[got[0]] = got[1]
            received.setdefault(got[0], []).append(O)
        # re-certify each grown piece once; fall back to standalone outer pieces
        standalone = len(pieces) - len(base)
        for k, outs in sorted(received.items()):
            before = min([john_constant(base[k], n_points // 2, seed)[0]] +
                         [john_constant(O, n_points // 2, seed)[0] for O in outs])
            after = john_constant(pieces[k], n_points, seed)[0]
            if after >= merge_factor * before:
                consts[k] = after
                continue
            pieces[k] = base[k]
            pieces.extend(outs)
            standalone += len(outs)
        meta["standalone_outer"] = standalone
        meta["frame"] = frame.to_json()
    consts = [consts[k] if k in consts else john_constant(q, n_points, seed)[0] for k, q in enumerate(pieces)]
    rho = min(consts)
    certs = [certify_john(q, rho, n_points, seed) for q in pieces]
    meta["john_constants"] = consts
    out = DomainPartition(inp, pieces, cuts, certs, rho, frame, ledger, meta)
    ok, slack = out.ledger(theta)
    meta["ledger_pass"] = ok
    meta["ledger_slack"] = slack
    return out
