"""Inscribed disks, rotundness, end-splits and slab partitions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import AngleTooSharp, JohnCutError, NotConvex, NotSemiconvexInput
from .geodesic import geodesic_distance, geodesic_to_concave, intrinsic_diameter
from .geom import Polygon, Segment, boundary_distance, min_max_extent, points_in_polygon, segments_in_polygon
from .partition import Chord, Partition, SplitResult, split_by_chord
from .predicates import segments_intersect
from .semiconvex import CandidateConfig, certify_semiconvex, check_part_seg_criterion

SEED_GRID = 64
REFINE_RTOL = 1e-7
MAX_ACTIVE_CELLS = 2048
SHARP_ANGLE = math.pi / 4
JITTER_STEP = 1e-7


# ---------------------------------------------------------------------------
# inscribed disk


def _chebyshev_lp(P: Polygon):
    V, E, L = P.arr, P.edge_vectors, P.edge_lengths
    nrm = np.stack([-E[:, 1], E[:, 0]], axis=1) / L[:, None]  # inward for ccw rings
    A = np.hstack([-nrm, np.ones((P.n, 1))])
    b = -np.einsum("ij,ij->i", nrm, V)
    res = linprog([0, 0, -1], A_ub=A, b_ub=b, bounds=[(None, None), (None, None), (0, None)], method="highs")
    r = float(res.x[2])
    # the maximiser set can be a segment; take its midpoint along the long axis
    _, _, ang = min_max_extent(P)
    u = np.array([-math.sin(ang), math.cos(ang)])
    A2 = np.vstack([A, [0, 0, -1]])
    b2 = np.append(b, -r * (1 - 1e-12))
    ends = []
    for sgn in (1, -1):
        res2 = linprog([-sgn * u[0], -sgn * u[1], 0], A_ub=A2, b_ub=b2, bounds=[(None, None), (None, None), (0, None)], method="highs")
        ends.append(res2.x[:2] if res2.status == 0 else res.x[:2])
    return 0.5 * (ends[0] + ends[1]), r


def _signed_clearance(P: Polygon, pts: np.ndarray) -> np.ndarray:
    d = boundary_distance(P, pts)
    inside, _ = points_in_polygon(P, pts, eps=0.0)
    return np.where(inside, d, -d)


def _cell_search(P: Polygon, grid: int = SEED_GRID, rtol: float = REFINE_RTOL):
    lo = P.arr.min(0)
    size = float((P.arr.max(0) - lo).max())
    h = size / grid / 2
    g = (np.arange(grid) + 0.5) * 2 * h
    C = np.stack(np.meshgrid(lo[0] + g, lo[1] + g), axis=-1).reshape(-1, 2)
    d = _signed_clearance(P, C)
    k = int(np.argmax(d))
    best, center = float(d[k]), C[k]
    tol = 0.1 * rtol * P.diag
    offs = np.array([[-1, -1], [1, -1], [-1, 1], [1, 1]], float)
    keep = d + h * math.sqrt(2) > best + tol
    C, d = C[keep], d[keep]
    while len(C) and h * math.sqrt(2) > tol:
        if len(C) > MAX_ACTIVE_CELLS:
            top = np.argsort(-d, kind="stable")[:MAX_ACTIVE_CELLS]
            C, d = C[top], d[top]
        h /= 2
        C = (C[:, None, :] + h * offs[None]).reshape(-1, 2)
        d = _signed_clearance(P, C)
        k = int(np.argmax(d))
        if d[k] > best:
            best, center = float(d[k]), C[k]
        keep = d + h * math.sqrt(2) > best + tol
        C, d = C[keep], d[keep]
    return center, best


def inscribed_disk(P: Polygon) -> tuple[tuple[float, float], float]:
    """Largest disk contained in P (center, radius); containment is re-verified."""
    if P.is_convex:
        c, r = _chebyshev_lp(P)
    else:
        c, r = _cell_search(P)
    c = np.asarray(c, float)
    r = min(float(r), float(boundary_distance(P, c[None])[0]))
    return (float(c[0]), float(c[1])), max(r, 0.0)


@dataclass(frozen=True)
class RotundCert:
    omega: float
    center: tuple[float, float]
    radius: float
    diameter: float
    status: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def ratio(self) -> float:
        return self.radius / self.diameter

    def to_json(self) -> dict:
        return {"omega": self.omega, "disk": {"center": list(self.center), "radius": self.radius},
                "diameter": self.diameter, "ratio": self.ratio, "status": self.status}


def certify_rotund(P: Polygon, omega: float) -> RotundCert:
    c, r = inscribed_disk(P)
    d = intrinsic_diameter(P)[0]
    ok = r >= omega * d * (1 - 1e-12)
    return RotundCert(omega, c, r, d, "pass" if ok else "fail")


def rotundity(P: Polygon) -> float:
    """Inscribed radius over intrinsic diameter."""
    return inscribed_disk(P)[1] / intrinsic_diameter(P)[0]


def convex_ball_bound(P: Polygon) -> tuple[tuple[float, float], float]:
    """Disk in a convex polygon; its radius dominates a quarter of the minimal width."""
    if not P.is_convex:
        raise NotConvex("polygon has concave vertices", step="convex_ball_bound")
    return inscribed_disk(P)


# ---------------------------------------------------------------------------
# axis frames and vertical sections


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame: u along the long axis, n = u rotated by +90 degrees."""

    u: tuple[float, float]
    n: tuple[float, float]

    def s(self, pts) -> np.ndarray:
        return np.asarray(pts, float) @ np.asarray(self.u)

    def y(self, pts) -> np.ndarray:
        return np.asarray(pts, float) @ np.asarray(self.n)


def _frame_from_angle(phi: float) -> Frame:
    u = (math.cos(phi), math.sin(phi))
    return Frame(u, (-u[1], u[0]))


def long_axis_frame(P: Polygon, jitter: bool = False) -> Frame:
    """Frame whose n realises the minimal width. With jitter, rotate in small steps
    until the vertex abscissae are pairwise separated by more than eps."""
    _, _, ang = min_max_extent(P)
    phi = ang - math.pi / 2
    u = np.array([math.cos(phi), math.sin(phi)])
    if u[0] < -1e-12 or (abs(u[0]) <= 1e-12 and u[1] < 0):
        phi += math.pi
    if not jitter:
        return _frame_from_angle(phi)
    for k in range(2000):
        f = _frame_from_angle(phi + k * JITTER_STEP)
        s = np.sort(f.s(P.arr))
        if np.all(np.diff(s) > P.eps):
            return f
    return _frame_from_angle(phi)


def sections(P: Polygon, frame: Frame, t: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """Maximal segments of P on the line {s = t}, lower endpoint first."""
    V = P.arr
    S = frame.s(V)
    eps = P.eps
    pts = [V[k] for k in np.nonzero(np.abs(S - t) <= eps)[0]]
    S1 = np.roll(S, -1)
    cross = ((S - t) * (S1 - t) < 0) & (np.abs(S - t) > eps) & (np.abs(S1 - t) > eps)
    for k in np.nonzero(cross)[0]:
        lam = (t - S[k]) / (S1[k] - S[k])
        pts.append(V[k] + lam * (V[(k + 1) % P.n] - V[k]))
    if len(pts) < 2:
        return []
    pts = np.array(pts)
    pts = pts[np.argsort(frame.y(pts), kind="stable")]
    out = []
    for a, b in zip(pts[:-1], pts[1:]):
        if np.hypot(*(b - a)) <= eps:
            continue
        inside, touches = segments_in_polygon(P, [a], [b])
        if inside[0] and not touches[0]:
            out.append((a, b))
    return out


def section_length(P: Polygon, frame: Frame, t: float, ref=None) -> float:
    segs = sections(P, frame, t)
    if not segs:
        return 0.0
    a, b = _pick(segs, frame, ref)
    return float(np.hypot(*(b - a)))


def _pick(segs, frame: Frame, ref):
    if ref is None or len(segs) == 1:
        return max(segs, key=lambda ab: float(np.hypot(*(ab[1] - ab[0]))))
    yr = float(frame.y(np.asarray(ref, float)))
    return min(segs, key=lambda ab: max(frame.y(ab[0]) - yr, yr - frame.y(ab[1]), 0.0))


def cut_at(P: Polygon, frame: Frame, t: float, ref=None) -> SplitResult:
    segs = sections(P, frame, t)
    if not segs:
        raise ValueError(f"no section at t={t}")
    a, b = _pick(segs, frame, ref)
    return split_by_chord(P, tuple(a), tuple(b))


def _side(sr: SplitResult, point) -> tuple[Polygon, Polygon]:
    """(piece containing point, other piece)."""
    ins1, _ = points_in_polygon(sr.q1, [point])
    ins2, _ = points_in_polygon(sr.q2, [point])
    if ins1[0] and not ins2[0]:
        return sr.q1, sr.q2
    if ins2[0] and not ins1[0]:
        return sr.q2, sr.q1
    d1 = float(np.min(np.hypot(*(sr.q1.arr - np.asarray(point)).T)))
    d2 = float(np.min(np.hypot(*(sr.q2.arr - np.asarray(point)).T)))
    return (sr.q1, sr.q2) if d1 <= d2 else (sr.q2, sr.q1)


def _bisect(g, lo: float, hi: float, iters: int = 60) -> float:
    """Point where g changes sign from <= 0 (at lo) to >= 0 (at hi)."""
    glo = g(lo)
    if glo >= 0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# end-split


@dataclass(frozen=True)
class EndSplit:
    p1: Polygon | None
    pmid: Polygon | None
    p2: Polygon | None
    s1: Segment | None = None
    s2: Segment | None = None
    trivial: bool = False
    info: dict = field(default_factory=dict, compare=False)

    @property
    def pieces(self) -> tuple[Polygon, ...]:
        return tuple(p for p in (self.p1, self.pmid, self.p2) if p is not None)

    @property
    def segments(self) -> tuple[Segment, ...]:
        return tuple(s for s in (self.s1, self.s2) if s is not None)


def _vertical_chords(P: Polygon, frame: Frame, vi: int):
    """Chords from concave vertex vi parallel to n (both directions), as (w, direction)."""
    v = P.arr[vi]
    out = []
    for sgn in (1.0, -1.0):
        d = sgn * np.asarray(frame.n)
        V, E = P.arr, P.edge_vectors
        den = d[0] * E[:, 1] - d[1] * E[:, 0]
        q = V - v
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (q[:, 0] * E[:, 1] - q[:, 1] * E[:, 0]) / den
            lam = (q[:, 0] * d[1] - q[:, 1] * d[0]) / den
        ok = (np.abs(den) > 1e-300) & (s > P.eps) & (lam >= -1e-12) & (lam <= 1 + 1e-12)
        if not ok.any():
            continue
        k = int(np.argmin(np.where(ok, s, np.inf)))
        w = v + s[k] * d
        inside, touches = segments_in_polygon(P, [v], [w])
        if inside[0] and not touches[0]:
            out.append((tuple(map(float, w)), sgn))
    return out


def _meets(path: np.ndarray, a, b) -> bool:
    return any(segments_intersect(tuple(path[k]), tuple(path[k + 1]), tuple(a), tuple(b)) for k in range(len(path) - 1))


def _max_ext(Q: Polygon) -> float:
    return min_max_extent(Q)[1]


def _min_ext(Q: Polygon) -> float:
    return min_max_extent(Q)[0]


def _dist_to_segment(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    t = float(np.clip((x - a) @ d / max(float(d @ d), 1e-300), 0.0, 1.0))
    return float(np.hypot(*(x - a - t * d)))


def end_clauses(P: Polygon, piece: Polygon, seg: Segment, vartheta: float) -> dict:
    """Numerical values behind the three end-split clauses for one end piece."""
    a, b = np.asarray(seg.a), np.asarray(seg.b)
    mx, mn = _max_ext(piece), _min_ext(piece)
    dists = [_dist_to_segment(piece.arr[k], a, b) for k in piece.concave]
    dists = [d for d in dists if d > P.eps]
    return {
        "segment_length": seg.length,
        "clause_i": seg.length <= vartheta * P.perimeter + P.eps,
        "C_ii": mx / mn,
        "C_iii": (mx / min(dists)) if dists else 0.0,
    }


def split_ends(P: Polygon, vartheta: float, cert=None, search: CandidateConfig | None = None) -> EndSplit:
    """Cut off at most two end pieces holding the concave vertices so that the middle is convex."""
    if cert is None:
        cert = certify_semiconvex(P, vartheta, search)
    if not cert.passed or cert.vartheta < vartheta:
        raise NotSemiconvexInput("polygon is not certified semiconvex at the requested constant", step="split_ends")
    frame = long_axis_frame(P, jitter=True)
    S = frame.s(P.arr)
    Y = frame.y(P.arr)
    ext1 = float(S.max() - S.min())
    ext2 = float(Y.max() - Y.min())
    if vartheta**2 * ext1 <= 12 * ext2:
        return EndSplit(P, None, None, trivial=True, info={"ext1": ext1, "ext2": ext2, "C": 12 / vartheta**2 + 1})
    i1, i2 = int(np.argmin(S)), int(np.argmax(S))
    p = [P.arr[i1], P.arr[i2]]
    _, gpath = geodesic_distance(P, p[0], p[1])
    gam = np.asarray(gpath.waypoints, float)
    conc = list(P.concave)
    d1 = geodesic_to_concave(P, p[0])
    d2 = geodesic_to_concave(P, p[1])
    groups = {0: [], 1: []}
    for k, vi in enumerate(conc):
        chords = _vertical_chords(P, frame, vi)
        hit = [c for c in chords if _meets(gam, P.arr[vi], c[0])]
        if not hit:
            continue
        groups[0 if d1[k] <= d2[k] else 1].append((vi, chords, hit[0]))
    info: dict = {"ext1": ext1, "ext2": ext2, "I": [], "r_bar": [0.0, 0.0]}
    cuts: list[tuple[float, int]] = []
    for i in (0, 1):
        if not groups[i]:
            continue
        sp = float(S[i1] if i == 0 else S[i2])
        vi, chords, first = max(groups[i], key=lambda it: abs(sp - float(S[it[0]])))
        v = P.vertices[vi]
        r = 0.0
        for w, sgn in chords:
            sr = split_by_chord(P, v, w)
            if w == first[0]:
                side, _ = _side(sr, p[i])
            else:
                hold = [q for q in (sr.q1, sr.q2) if not any(points_in_polygon(q, [p[0], p[1]])[0])]
                if not hold:
                    continue
                side = hold[0]
            r = max(r, intrinsic_diameter(side)[0])
        info["I"].append(i)
        info["r_bar"][i] = r
        sign = 1.0 if i == 0 else -1.0
        lo = sp + sign * 3 * r
        hi = sp + sign * ext1 / 4

        def ref_at(t):
            # point of the geodesic at abscissa t
            gs = frame.s(gam)
            for k in range(len(gam) - 1):
                a, b = gs[k], gs[k + 1]
                if min(a, b) - 1e-15 <= t <= max(a, b) + 1e-15 and a != b:
                    lam = (t - a) / (b - a)
                    return gam[k] + lam * (gam[k + 1] - gam[k])
            return gam[0]

        def g(t, sp=sp, r=r, sign=sign):
            return sign * (t - sp) - max(section_length(P, frame, t, ref_at(t)), 3 * r)

        if sign > 0:
            t = _bisect(g, lo, hi)
        else:
            t = -_bisect(lambda z: g(-z), -lo, -hi)
        cuts.append((t, i))
        info[f"t{i + 1}"] = t
        info[f"ref{i + 1}"] = ref_at(t)
    if not cuts:
        return EndSplit(None, P, None, info=info)
    rest = P
    ends: dict[int, tuple[Polygon, Segment]] = {}
    for t, i in cuts:
        sr = cut_at(rest, frame, t, info[f"ref{i + 1}"])
        piece, rest = _side(sr, p[i])
        ends[i] = (piece, Segment(sr.chord.v, sr.chord.w))
    p1, s1 = ends.get(0, (None, None))
    p2, s2 = ends.get(1, (None, None))
    info["pmid_convex"] = rest.is_convex
    for key, pc, sg in (("end1", p1, s1), ("end2", p2, s2)):
        if pc is not None:
            info[key] = end_clauses(P, pc, sg, vartheta)
    return EndSplit(p1, rest, p2, s1, s2, info=info)


def part_seg_alpha(vartheta: float) -> float:
    """Base-angle floor used to admit end pieces through the segment criterion."""
    return math.atan(vartheta**2 / 13)


# ---------------------------------------------------------------------------
# slab partition of convex polygons


def _end_trims(P: Polygon, frame: Frame, theta: float) -> tuple[float, float]:
    """Innermost abscissae s1 <= s2 such that every edge of P between them is within
    arctan(theta) of the long axis."""
    V, E = P.arr, P.edge_vectors
    du = frame.s(E)
    dy = frame.y(E)
    steep = np.abs(dy) > theta * np.abs(du)
    S = frame.s(V)
    S1 = np.roll(S, -1)
    s1, s2 = float(S.min()), float(S.max())
    left = steep & (dy < 0)
    right = steep & (dy > 0)
    if left.any():
        s1 = float(np.max(np.maximum(S, S1)[left]))
    if right.any():
        s2 = float(np.min(np.minimum(S, S1)[right]))
    return s1, s2


def slab_partition_convex(P: Polygon, theta: float, aspect_factor: float = 7.0, stop_factor: float = 4.0,
                          omega: float | None = None) -> Partition:
    """Cut a convex polygon by lines orthogonal to its long axis into rotund slabs."""
    if not P.is_convex:
        raise NotConvex("slab partition needs a convex polygon", step="slab_partition_convex")
    if P.angles.min() < SHARP_ANGLE - 1e-9:
        raise AngleTooSharp("slab partition needs all angles >= pi/4", step="slab_partition_convex")
    frame = long_axis_frame(P)
    S, Y = frame.s(P.arr), frame.y(P.arr)
    ext1, ext2 = float(S.max() - S.min()), float(Y.max() - Y.min())
    meta = {"theta": theta, "ext1": ext1, "ext2": ext2, "aspect_factor": aspect_factor, "stop_factor": stop_factor}
    ts: list[float] = []
    if ext1 >= aspect_factor / theta * ext2:
        s1, s2 = _end_trims(P, frame, theta)
        meta.update(s1=s1, s2=s2)
        H = lambda t: section_length(P, frame, t)  # noqa: E731
        h2 = H(s2 - P.eps) if s2 - P.eps > s1 else H(s2)
        tn = s1
        while s2 - tn > stop_factor / theta * h2:
            t = _bisect(lambda z, tn=tn: (z - tn) - H(z) / theta, tn, s2)
            if t <= tn + P.eps:
                break
            ts.append(t)
            tn = t
    pieces, cuts = [], []
    rest = P
    for t in ts:
        sr = cut_at(rest, frame, t)
        a, b = sr.q1, sr.q2
        if frame.s(a.arr).min() > frame.s(b.arr).min():
            a, b = b, a
        pieces.append(a)
        cuts.append(sr.chord)
        rest = b
    pieces.append(rest)
    meta["cuts_t"] = ts
    ratios = [rotundity(q) for q in pieces]
    meta["rotundity"] = ratios
    meta["omega"] = omega if omega is not None else min(ratios)
    return Partition(P, tuple(pieces), (), tuple(cuts), meta)


# ---------------------------------------------------------------------------
# semiconvex -> semiconvex and rotund


def trim_sharp_angles(P: Polygon, eps_budget: float, min_angle: float = SHARP_ANGLE):
    """Cut isosceles triangles off every vertex with angle < min_angle.

    Returns (core polygon, triangles, cut chords). The triangles' total perimeter
    stays within eps_budget."""
    sharp = [i for i, a in enumerate(P.angles) if a < min_angle]
    if not sharp:
        return P, [], []
    share = eps_budget / len(sharp)
    ring, tris, chords = [], [], []
    n = P.n
    L = P.edge_lengths
    for i in range(n):
        if i not in sharp:
            ring.append(P.vertices[i])
            continue
        v = P.arr[i]
        a = P.angles[i]
        leg = min(share / (2 + 2 * math.sin(a / 2)), 0.45 * L[(i - 1) % n], 0.45 * L[i])
        prev, nxt = P.arr[(i - 1) % n], P.arr[(i + 1) % n]
        pa = v + leg * (prev - v) / np.hypot(*(prev - v))
        pb = v + leg * (nxt - v) / np.hypot(*(nxt - v))
        pa, pb = tuple(map(float, pa)), tuple(map(float, pb))
        ring += [pa, pb]
        tris.append(Polygon.trusted([pa, P.vertices[i], pb], P.eps))
        chords.append(Chord(pa, pb))
    return Polygon.trusted(ring, P.eps), tris, chords


def decompose_rotund(P: Polygon, theta: float, vartheta: float, epsilon: float, cert=None,
                     aspect_factor: float = 7.0, stop_factor: float = 4.0,
                     search: CandidateConfig | None = None) -> Partition:
    """End-split, trim sharp corners of the convex middle, slab-partition it."""
    if P.is_convex:
        es = EndSplit(None, P, None, info={"convex_input": True})
    else:
        es = split_ends(P, vartheta, cert, search)
    if es.trivial:
        return Partition(P, (P,), (), (), {"end_split": es.info, "trivial": True, "theta": theta})
    cuts: list[Chord] = [Chord(s.a, s.b) for s in es.segments]
    core, tris, tcuts = trim_sharp_angles(es.pmid, epsilon)
    cuts += tcuts
    slabs = slab_partition_convex(core, theta, aspect_factor, stop_factor)
    cuts += list(slabs.cuts)
    ends_ok = {}
    for key, pc, sg in (("end1", es.p1, es.s1), ("end2", es.p2, es.s2)):
        if pc is None:
            continue
        try:
            ends_ok[key] = check_part_seg_criterion(P, Chord(sg.a, sg.b), part_seg_alpha(vartheta), side=_side_index(P, sg, pc))
        except JohnCutError:
            ends_ok[key] = None
    pieces = [q for q in (es.p1,) if q is not None] + list(slabs.pieces) + [q for q in (es.p2,) if q is not None]
    part = Partition(P, tuple(pieces), tuple(tris), tuple(cuts), {})
    H = P.perimeter
    part.meta.update(
        theta=theta,
        vartheta=vartheta,
        epsilon=epsilon,
        end_split=es.info,
        part_seg=ends_ok,
        slab=slabs.meta,
        exceptional_boundary=part.exceptional_boundary,
        ledger_C=(part.boundary_total - H) / (theta * H),
    )
    return part


def _side_index(P: Polygon, seg: Segment, piece: Polygon) -> int:
    sr = split_by_chord(P, seg.a, seg.b)
    return 1 if abs(sr.q1.area - piece.area) <= abs(sr.q2.area - piece.area) else 2
