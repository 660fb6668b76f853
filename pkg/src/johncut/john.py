"""John curves: construction, carrot verification and certification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path

from .errors import BallCoversDomain, ConstructionFailed, CurveExitsPolygon, JohnCutError, SharedTooShort
from .geodesic import GeodesicPath, geodesic_distance
from .geom import Polygon, boundary_distance, min_max_extent, points_in_polygon, segments_in_polygon
from .partition import merge_polygons, shared_length
from .rotund import certify_rotund, inscribed_disk
from .semiconvex import CandidateConfig, certify_semiconvex

ARC_POINTS = 24
CURVE_SAMPLES = 2000
CONSTANT_VARTHETAS = (0.1, 0.2, 0.3, 0.45)
LABELS = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class CurvePiece:
    label: str
    points: np.ndarray
    kind: str = "segment"  # segment | polyline | arc

    @property
    def length(self) -> float:
        return float(np.hypot(*np.diff(self.points, axis=0).T).sum())


@dataclass(frozen=True)
class JohnCurve:
    pieces: tuple[CurvePiece, ...]
    gamma0: GeodesicPath
    offsets: tuple = ()
    groups: tuple = ()
    mode: str = "constructed-curve"

    def polyline(self) -> np.ndarray:
        pts = [self.pieces[0].points[0]]
        for pc in self.pieces:
            for q in pc.points:
                if np.hypot(*(q - pts[-1])) > 0:
                    pts.append(q)
        return np.asarray(pts)

    @property
    def length(self) -> float:
        return float(sum(pc.length for pc in self.pieces))

    @property
    def length_ratio(self) -> float:
        return self.length / self.gamma0.length if self.gamma0.length > 0 else 1.0

    def junction_gaps(self) -> list[float]:
        return [float(np.hypot(*(b.points[0] - a.points[-1]))) for a, b in zip(self.pieces, self.pieces[1:])]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(pc.label for pc in self.pieces)


def _unit(d: np.ndarray) -> np.ndarray:
    return d / np.hypot(*d)


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _right(d):
    return np.array([d[1], -d[0]])


def _left(d):
    return np.array([-d[1], d[0]])


def _polyline_inside(P: Polygon, pts: np.ndarray) -> bool:
    if len(pts) < 2:
        return bool(points_in_polygon(P, pts)[0].all())
    inside, _ = segments_in_polygon(P, pts[:-1], pts[1:])
    return bool(inside.all())


def _diamond_clip(a: np.ndarray, b: np.ndarray, c: np.ndarray, e: np.ndarray, m: np.ndarray, h: float) -> bool:
    """Does the open diamond |x.e'|+|x.m'| < h (axes e, m, centred at c) meet segment ab?"""
    # diamond faces: (+-e +- m)/sqrt2 . (x - c) < h/sqrt2
    lo, hi = 0.0, 1.0
    d = b - a
    for se in (1, -1):
        for sm in (1, -1):
            nvec = se * e + sm * m
            num = h - float(nvec @ (a - c))
            den = float(nvec @ d)
            if abs(den) < 1e-300:
                if num <= 0:
                    return False
                continue
            t = num / den
            if den > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
    return hi - lo > 1e-9


def _corridor(P: Polygon, a, b, v0, v1, t0: float, vartheta: float, square_at: list) -> np.ndarray | None:
    """Shortest path from a to b inside P ∩ R avoiding diamonds around concave vertices.

    R is the rectangle around [v0;v1] of half-width 2ϑ²t1, diamonds C(v) have
    half-diagonal 2ϑ² l(v) with l(v) = t0 + (v - v0).e."""
    a, b, v0, v1 = (np.asarray(z, float) for z in (a, b, v0, v1))
    dvec = v1 - v0
    d = float(np.hypot(*dvec))
    e = dvec / d
    m = _left(e)
    t1 = t0 + d
    half = 2 * vartheta**2 * t1
    k2 = 2 * vartheta**2

    def in_rect(x):
        al = (x - v0) @ e
        ac = (x - v0) @ m
        return (al >= -1e-12 * d) & (al <= d * (1 + 1e-12)) & (np.abs(ac) <= half * (1 + 1e-12))

    conc = P.arr[list(P.concave)] if P.concave else np.zeros((0, 2))
    centres = [np.asarray(c, float) for c in square_at]
    for c in conc:
        if in_rect(c[None])[0] and not any(np.allclose(c, z) for z in centres):
            centres.append(c)
    diamonds = []
    for c in centres:
        hl = k2 * (t0 + float((c - v0) @ e))
        if hl > 0:
            diamonds.append((c, hl))
    nodes = [a, b]
    for c, hl in diamonds:
        for dd in (e, -e, m, -m):
            nodes.append(c + dd * hl * (1 + 1e-9))
    # boundary points of P on the rectangle sides
    corners = [v0 + half * m, v1 + half * m, v1 - half * m, v0 - half * m]
    V, E = P.arr, P.edge_vectors
    for k in range(4):
        p0, p1 = corners[k], corners[(k + 1) % 4]
        r = p1 - p0
        den = r[0] * E[:, 1] - r[1] * E[:, 0]
        q = V - p0
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (q[:, 0] * E[:, 1] - q[:, 1] * E[:, 0]) / den
            lam = (q[:, 0] * r[1] - q[:, 1] * r[0]) / den
        ok = (np.abs(den) > 1e-300) & (s >= 0) & (s <= 1) & (lam >= 0) & (lam <= 1)
        nodes.extend(p0 + s[ok][:, None] * r)
    nodes.extend(c for c in corners)
    N = np.asarray(nodes)
    keep = in_rect(N) & points_in_polygon(P, N)[0]
    keep[:2] = True
    N = N[keep]
    k = len(N)
    ii, jj = np.triu_indices(k, 1)
    inside, _ = segments_in_polygon(P, N[ii], N[jj])
    W = np.full((k, k), np.inf)
    for idx in np.nonzero(inside)[0]:
        i, j = ii[idx], jj[idx]
        if any(_diamond_clip(N[i], N[j], c, e, m, hl) for c, hl in diamonds):
            continue
        W[i, j] = W[j, i] = float(np.hypot(*(N[i] - N[j])))
    np.fill_diagonal(W, 0.0)
    D, pred = shortest_path(csgraph_from_dense(W, null_value=np.inf), directed=False, indices=0, return_predecessors=True)
    if not math.isfinite(D[1]):
        return None
    path = [1]
    while path[-1] != 0:
        path.append(int(pred[path[-1]]))
    return N[path[::-1]]


def _arc(c: np.ndarray, r: float, nu0: np.ndarray, nu1: np.ndarray, n: int = ARC_POINTS) -> np.ndarray:
    a0 = math.atan2(nu0[1], nu0[0])
    a1 = math.atan2(nu1[1], nu1[0])
    delta = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
    ang = a0 + delta * np.linspace(0, 1, n)
    return c + r * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _offsets(W: np.ndarray, t: np.ndarray, vartheta: float):
    """Turn signs, unit normals (nu-, nu+) and offset points at each interior waypoint."""
    out = []
    for i in range(1, len(W) - 1):
        din = _unit(W[i] - W[i - 1])
        dout = _unit(W[i + 1] - W[i])
        turn = 1 if _cross(din, dout) > 0 else -1
        side = _right if turn > 0 else _left
        nm, npl = side(din), side(dout)
        rad = 2 * vartheta**2 * t[i]
        out.append((turn, nm, npl, W[i] + rad * nm, W[i] + rad * npl, rad))
    return out


def build_john_curve(P: Polygon, vartheta: float, omega: float, x, p, g0: GeodesicPath | None = None) -> JohnCurve:
    """Curve from x to p hugging the geodesic at offset 2ϑ²t around each bend."""
    x = np.asarray(x, float)
    p = np.asarray(p, float)
    if g0 is None:
        _, g0 = geodesic_distance(P, x, p)
    W = np.asarray(g0.waypoints, float)
    if len(W) == 2:
        return JohnCurve((CurvePiece("IV", W.copy()),), g0, mode="direct-segment")
    t = np.asarray(g0.t)
    off = _offsets(W, t, vartheta)
    n = len(W) - 1
    groups = []
    for i in range(n):
        if i == 0 or i == n - 1:
            groups.append("end")
        elif off[i - 1][0] != off[i][0]:
            groups.append("separating")
        elif t[i + 1] - t[i] >= 4 * vartheta**2 * t[i + 1]:
            groups.append("length")
        else:
            groups.append("helix")
    pieces: list[CurvePiece] = []
    cur = x
    for i in range(n):
        if i < n - 1:
            target = off[i][3]
        else:
            target = p
        squares = [W[j] for j in (i, i + 1) if 0 < j < n]
        straight = np.vstack([cur, target])
        label = "IV" if i == n - 1 else ("III" if groups[i] == "helix" else "II")
        if _polyline_inside(P, straight) and label != "II":
            pieces.append(CurvePiece(label, straight))
        else:
            path = _corridor(P, cur, target, W[i], W[i + 1], float(t[i]), vartheta, squares)
            if path is None:
                if _polyline_inside(P, straight):
                    path = straight
                else:
                    raise ConstructionFailed(f"no corridor path on segment {i}", step="II")
            pieces.append(CurvePiece(label, path, "polyline" if len(path) > 2 else "segment"))
        if i < n - 1:
            turn, nm, npl, wm, wp, rad = off[i]
            arc = _arc(W[i + 1], rad, nm, npl)
            if not _polyline_inside(P, arc):
                raise ConstructionFailed(f"arc around waypoint {i + 1} leaves the polygon", step="I")
            pieces.append(CurvePiece("I", arc, "arc"))
            cur = wp
    offsets = tuple((tuple(o[3]), tuple(o[4])) for o in off)
    return JohnCurve(tuple(pieces), g0, offsets, tuple(groups))


def offset_geodesic(P: Polygon, vartheta: float, x, p, g0: GeodesicPath | None = None) -> JohnCurve:
    """Geodesic with every bend pushed inward by 2ϑ²t along the bisecting normal."""
    x = np.asarray(x, float)
    p = np.asarray(p, float)
    if g0 is None:
        _, g0 = geodesic_distance(P, x, p)
    W = np.asarray(g0.waypoints, float)
    t = np.asarray(g0.t)
    pts = [x]
    for i, (turn, nm, npl, _, _, rad) in enumerate(_offsets(W, t, vartheta), start=1):
        b = nm + npl
        b = b / max(np.hypot(*b), 1e-300)
        pts.append(W[i] + rad * b)
    pts.append(p)
    pts = np.asarray(pts)
    for _ in range(20):
        if _polyline_inside(P, pts):
            break
        pts[1:-1] = 0.5 * (pts[1:-1] + W[1:-1])
    else:
        pts = W
    return JohnCurve((CurvePiece("IV", pts, "polyline"),), g0, mode="geodesic-fallback")


# ---------------------------------------------------------------------------
# carrot verification


def _as_polyline(curve) -> np.ndarray:
    if isinstance(curve, JohnCurve):
        return curve.polyline()
    return np.asarray(curve, float)


def _samples(pts: np.ndarray, n: int):
    seg = np.hypot(*np.diff(pts, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.union1d(np.linspace(0, cum[-1], n), cum)
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    lam = np.where(seg[k] > 0, (s - cum[k]) / np.where(seg[k] > 0, seg[k], 1), 0.0)
    return s, pts[k] + lam[:, None] * (pts[k + 1] - pts[k])


def margin_tolerance(P: Polygon) -> float:
    return 1e-7 * min_max_extent(P)[1]


def verify_carrot(P: Polygon, curve, rho: float, n_samples: int = CURVE_SAMPLES, tol: float | None = None):
    """(ok, worst margin, argmin t) of m(t) = dist(γ(t), ∂P) − ρ t."""
    pts = _as_polyline(curve)
    if len(pts) < 2:
        raise CurveExitsPolygon("curve needs at least two points", step="verify_carrot")
    if not _polyline_inside(P, pts):
        raise CurveExitsPolygon("curve leaves the polygon", step="verify_carrot")
    s, X = _samples(pts, n_samples)
    m = boundary_distance(P, X) - rho * s
    k = int(np.argmin(m))
    tol = margin_tolerance(P) if tol is None else tol
    return bool(m[k] >= -tol), float(m[k]), float(s[k])


def carrot_ratio(P: Polygon, curve, n_samples: int = CURVE_SAMPLES) -> float:
    """Largest ρ for which the curve's carrot stays in P: min over t>0 of dist/t."""
    pts = _as_polyline(curve)
    s, X = _samples(pts, n_samples)
    pos = s > 0
    if not pos.any():
        return math.inf
    return float(np.min(boundary_distance(P, X[pos]) / s[pos]))


# ---------------------------------------------------------------------------
# certification


def sample_points(P: Polygon, n: int, seed: int = 42) -> np.ndarray:
    """Stratified interior points: half uniform in area, a quarter near the boundary,
    the rest near concave vertices (or near the boundary for convex P)."""
    rng = np.random.default_rng(seed)
    lo, hi = P.arr.min(0), P.arr.max(0)
    margin = 1e-6 * P.diag
    n_area = n // 2
    n_bnd = n // 4 if P.concave else n - n_area
    n_conc = n - n_area - n_bnd
    out = []
    while sum(len(o) for o in out) < n_area:
        X = rng.uniform(lo, hi, size=(4 * n_area + 16, 2))
        ok = points_in_polygon(P, X)[0] & (boundary_distance(P, X) > margin)
        out.append(X[ok])
    area_pts = np.concatenate(out)[:n_area] if out else np.zeros((0, 2))
    got = []
    E, L = P.edge_vectors, P.edge_lengths
    nrm = np.stack([-E[:, 1], E[:, 0]], axis=1) / L[:, None]
    while len(got) < n_bnd:
        s = rng.uniform(0, P.perimeter, size=4 * n_bnd + 8)
        k = np.clip(np.searchsorted(P.cum_length, s, side="right") - 1, 0, P.n - 1)
        q = P.points_at(s) + nrm[k] * (rng.uniform(1e-3, 2e-2, size=len(s)) * P.diag)[:, None]
        ok = points_in_polygon(P, q)[0] & (boundary_distance(P, q) > margin)
        got.extend(q[ok])
    bnd_pts = np.asarray(got[:n_bnd]).reshape(-1, 2)
    got = []
    conc = P.arr[list(P.concave)] if P.concave else np.zeros((0, 2))
    while len(got) < n_conc:
        c = conc[rng.integers(0, len(conc), size=4 * n_conc + 8)]
        ang = rng.uniform(0, 2 * math.pi, size=len(c))
        rad = rng.uniform(1e-3, 5e-2, size=len(c)) * P.diag
        q = c + rad[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        ok = points_in_polygon(P, q)[0] & (boundary_distance(P, q) > margin)
        got.extend(q[ok])
    conc_pts = np.asarray(got[:n_conc]).reshape(-1, 2)
    return np.vstack([area_pts, bnd_pts, conc_pts])


@dataclass(frozen=True)
class JohnSample:
    x: tuple[float, float]
    mode: str
    margin: float
    labels: tuple[str, ...] = ()
    curve: JohnCurve | None = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        return {"x": list(self.x), "mode": self.mode, "margin": self.margin, "labels": list(self.labels)}


@dataclass(frozen=True)
class JohnCert:
    rho: float
    center: tuple[float, float]
    samples: tuple[JohnSample, ...] = field(repr=False)
    status: str
    length_ratio: float = 1.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def worst_margin(self) -> float:
        return min(s.margin for s in self.samples) if self.samples else math.inf

    def to_json(self, with_samples: bool = True) -> dict:
        out = {"rho": self.rho, "center": list(self.center), "status": self.status,
               "worst_margin": self.worst_margin, "length_ratio": self.length_ratio, "n_samples": len(self.samples)}
        if with_samples:
            out["samples"] = [s.to_json() for s in self.samples]
        return out


def _candidate_curves(P: Polygon, x, p, vartheta: float, omega: float, g0: GeodesicPath | None = None):
    """Straight segment, constructed curve, offset geodesic, in this order (lazily)."""
    if g0 is None:
        _, g0 = geodesic_distance(P, x, p)
    if len(g0.waypoints) == 2:
        yield JohnCurve((CurvePiece("IV", np.vstack([x, p])),), g0, mode="direct-segment")
        return
    try:
        yield build_john_curve(P, vartheta, omega, x, p, g0)
    except JohnCutError:
        pass
    yield offset_geodesic(P, vartheta, x, p, g0)


def _default_vartheta(rho: float) -> float:
    return min(max(rho ** (1 / 3), 0.05), 0.45)


def certify_john(P: Polygon, rho: float, n_points: int = 200, seed: int = 42, vartheta: float | None = None,
                 omega: float | None = None, n_curve_samples: int = CURVE_SAMPLES, center=None) -> JohnCert:
    if center is None:
        center, _ = inscribed_disk(P)
    p = np.asarray(center, float)
    vt = _default_vartheta(rho) if vartheta is None else vartheta
    om = omega if omega is not None else 0.0
    tol = margin_tolerance(P)
    samples = []
    ratio = 1.0
    for x in sample_points(P, n_points, seed):
        best = None
        for cv in _candidate_curves(P, x, p, vt, om):
            try:
                ok, worst, _ = verify_carrot(P, cv, rho, n_curve_samples, tol)
            except CurveExitsPolygon:
                continue
            if best is None or worst > best[1]:
                best = (cv, worst)
            if ok:
                break
        if best is None:
            samples.append(JohnSample(tuple(map(float, x)), "none", -math.inf))
            continue
        cv, worst = best
        ratio = max(ratio, cv.length_ratio)
        samples.append(JohnSample(tuple(map(float, x)), cv.mode, worst, cv.labels, cv))
    ok = all(s.margin >= -tol for s in samples)
    return JohnCert(rho, (float(p[0]), float(p[1])), tuple(samples), "pass" if ok else "fail", ratio)


def _round_down(x: float, digits: int = 3) -> float:
    if x <= 0 or not math.isfinite(x):
        return max(x, 0.0) if math.isfinite(x) else x
    e = math.floor(math.log10(x)) - digits + 1
    q = 10.0**e
    return math.floor(x / q * (1 + 1e-12)) * q


def john_constant(P: Polygon, n_points: int = 200, seed: int = 42, varthetas=CONSTANT_VARTHETAS,
                  n_curve_samples: int = CURVE_SAMPLES, center=None) -> tuple[float, dict]:
    """Estimated John constant: min over sampled x of the best curve's carrot ratio,
    rounded down to three significant digits."""
    if center is None:
        center, _ = inscribed_disk(P)
    p = np.asarray(center, float)
    worst, where = math.inf, None
    for x in sample_points(P, n_points, seed):
        best = 0.0
        _, g0 = geodesic_distance(P, x, p)
        for vt in varthetas:
            for cv in _candidate_curves(P, x, p, vt, 0.0, g0):
                if cv.mode != "direct-segment" and not _polyline_inside(P, cv.polyline()):
                    continue
                best = max(best, carrot_ratio(P, cv, n_curve_samples))
            if len(g0.waypoints) == 2:
                break
        if best < worst:
            worst, where = best, tuple(map(float, x))
    rho = _round_down(min(worst, 1.0))
    return rho, {"raw": worst, "worst_point": where, "center": (float(p[0]), float(p[1]))}


def john_converse_check(P: Polygon, rho: float, search: CandidateConfig | None = None):
    """Semiconvexity and rotundness certificates at ρ/4."""
    q = rho / 4
    return certify_semiconvex(P, q, search), certify_rotund(P, q)


def plump_check(P: Polygon, cert: JohnCert, x, r: float, grid: int = 32) -> bool:
    """Is there z in the closed ball B(x,r) with B(z, ρr/2) inside P?"""
    x = np.asarray(x, float)
    if np.all(np.hypot(*(P.arr - x).T) <= r):
        raise BallCoversDomain("ball contains the whole polygon", step="plump_check")
    need = 0.5 * cert.rho * r
    g = np.linspace(-r, r, grid)
    Z = x + np.stack(np.meshgrid(g, g), axis=-1).reshape(-1, 2)
    Z = Z[np.hypot(*(Z - x).T) <= r]
    Z = np.vstack([x, Z])
    inside = points_in_polygon(P, Z)[0]
    Z = Z[inside]
    if len(Z) == 0:
        return False
    d = boundary_distance(P, Z)
    if d.max() >= need:
        return True
    # refine around the best grid point
    z = Z[int(np.argmax(d))]
    h = 2 * r / grid
    for _ in range(30):
        cand = z + h * np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]])
        cand = cand[(np.hypot(*(cand - x).T) <= r) & points_in_polygon(P, cand)[0]]
        dc = boundary_distance(P, cand)
        z = cand[int(np.argmax(dc))]
        if dc.max() >= need:
            return True
        h /= 2
    return False


def merge_regions(d1: Polygon, c1: JohnCert, d2: Polygon, c2: JohnCert, c_prime: float = 0.05,
                  n_points: int = 200, seed: int = 42):
    """Glue two John pieces along their common boundary and re-certify the union."""
    shared = shared_length(d1, d2)
    if shared <= 0:
        merged = merge_polygons(d1, d2)  # raises NotAdjacent
    diam = min(min_max_extent(d1)[1], min_max_extent(d2)[1])
    if shared < c_prime * diam:
        raise SharedTooShort(f"shared boundary {shared:.3g} below {c_prime} x {diam:.3g}", step="merge_regions")
    merged = merge_polygons(d1, d2, drop_straight=True)
    rho, info = john_constant(merged, n_points, seed)
    cert = certify_john(merged, rho, n_points, seed)
    return merged, cert
