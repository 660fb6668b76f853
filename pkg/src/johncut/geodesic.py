"""Shortest paths inside a simple polygon via the reflex-vertex visibility graph."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path

from .errors import PointOutside, SegmentNotInPolygon
from .geom import Point, Polygon, points_in_polygon, segment_in_polygon, segments_in_polygon


@dataclass(frozen=True)
class GeodesicPath:
    waypoints: tuple[Point, ...]
    length: float

    @property
    def t(self) -> tuple[float, ...]:
        """Cumulative arclength at each waypoint."""
        w = np.asarray(self.waypoints, float)
        seg = np.hypot(*np.diff(w, axis=0).T) if len(w) > 1 else np.zeros(0)
        return tuple(float(x) for x in np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def interior(self) -> tuple[Point, ...]:
        return self.waypoints[1:-1]


@dataclass(frozen=True)
class _Graph:
    K: np.ndarray  # concave vertex coordinates, sorted lexicographically
    K_index: np.ndarray  # their indices in the polygon ring
    D: np.ndarray  # all-pairs geodesic distances between concave vertices
    pred: np.ndarray


def _minplus(A: np.ndarray, B: np.ndarray, budget: int = 4_000_000) -> np.ndarray:
    """(A ⊗ B)[i,j] = min_k A[i,k] + B[k,j]."""
    n, k = A.shape
    m = B.shape[1]
    out = np.empty((n, m))
    step = max(1, budget // max(k * m, 1))
    for s in range(0, n, step):
        out[s : s + step] = np.min(A[s : s + step, :, None] + B[None, :, :], axis=1)
    return out


@lru_cache(maxsize=2048)
def _graph(P: Polygon) -> _Graph:
    idx = np.array(P.concave, int)
    if len(idx) == 0:
        z = np.zeros((0, 0))
        return _Graph(np.zeros((0, 2)), idx, z, z.astype(int))
    K = P.arr[idx]
    order = np.lexsort((K[:, 1], K[:, 0]))
    idx, K = idx[order], K[order]
    k = len(K)
    ii, jj = np.triu_indices(k, 1)
    vis, _ = segments_in_polygon(P, K[ii], K[jj])
    W = np.full((k, k), np.inf)
    d = np.hypot(*(K[ii] - K[jj]).T)
    W[ii[vis], jj[vis]] = d[vis]
    W[jj[vis], ii[vis]] = d[vis]
    np.fill_diagonal(W, 0.0)
    D, pred = shortest_path(csgraph_from_dense(W, null_value=np.inf), directed=False, return_predecessors=True)
    for arr in (D, pred, K, idx):
        arr.setflags(write=False)
    return _Graph(K, idx, D, pred)


def _to_concave(P: Polygon, g: _Graph, pts: np.ndarray) -> np.ndarray:
    """Straight-line distance from each point to each visible concave vertex (inf if hidden)."""
    m, k = len(pts), len(g.K)
    if k == 0:
        return np.zeros((m, 0))
    A = np.repeat(pts, k, axis=0)
    B = np.tile(g.K, (m, 1))
    vis, _ = segments_in_polygon(P, A, B)
    d = np.hypot(*(A - B).T)
    return np.where(vis, d, np.inf).reshape(m, k)


def _check_inside(P: Polygon, *pts) -> None:
    ins, _ = points_in_polygon(P, np.asarray(pts, float))
    if not ins.all():
        raise PointOutside("point lies outside the polygon", step="geodesic")


def _walk(g: _Graph, a: int, b: int) -> list[int]:
    path = [b]
    while path[-1] != a:
        path.append(int(g.pred[a, path[-1]]))
    return path[::-1]


def geodesic_distance(P: Polygon, p, q) -> tuple[float, GeodesicPath]:
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    _check_inside(P, p, q)
    g = _graph(P)
    straight = float(np.hypot(*(q - p)))
    vis, _ = segments_in_polygon(P, [p], [q])
    if vis[0] or len(g.K) == 0:
        return straight, GeodesicPath((tuple(p), tuple(q)), straight)
    Ap, Aq = _to_concave(P, g, np.vstack([p, q]))
    total = Ap[:, None] + g.D + Aq[None, :]
    a, b = np.unravel_index(int(np.argmin(total)), total.shape)
    length = float(total[a, b])
    if not math.isfinite(length):
        raise PointOutside("no path found between the points", step="geodesic")
    nodes = _walk(g, int(a), int(b))
    pts = [tuple(map(float, p))] + [tuple(map(float, g.K[i])) for i in nodes] + [tuple(map(float, q))]
    return length, GeodesicPath(tuple(pts), length)


def geodesic_to_concave(P: Polygon, p) -> np.ndarray:
    """Geodesic distance from p to every concave vertex, in ring-index order of P.concave."""
    g = _graph(P)
    if len(g.K) == 0:
        return np.zeros(0)
    A = _to_concave(P, g, np.atleast_2d(np.asarray(p, float)))
    G = _minplus(A, np.asarray(g.D))[0]
    out = np.empty(len(G))
    pos = {int(j): i for i, j in enumerate(P.concave)}
    for col, j in enumerate(g.K_index):
        out[pos[int(j)]] = G[col]
    return out


@lru_cache(maxsize=4096)
def intrinsic_diameter(P: Polygon) -> tuple[float, tuple[Point, Point]]:
    V = P.arr
    n = len(V)
    diff = V[:, None, :] - V[None, :, :]
    E = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    g = _graph(P)
    if len(g.K) == 0:
        i, j = np.unravel_index(int(np.argmax(E)), E.shape)
        return float(E[i, j]), (P.vertices[i], P.vertices[j])
    A = _to_concave(P, g, V)
    H = _minplus(_minplus(A, np.asarray(g.D)), A.T)
    ii, jj = np.triu_indices(n, 1)
    h = H[ii, jj]
    order = np.argsort(-h, kind="stable")
    best, pair = 0.0, (0, 1)
    tol = P.eps
    pos = 0
    while pos < len(order):
        batch = order[pos : pos + 64]
        pos += 64
        hb = h[batch]
        if hb[0] <= best + tol:
            break
        need = hb > E[ii[batch], jj[batch]] + tol
        vis = np.ones(len(batch), bool)
        if need.any():
            vis[need] = segments_in_polygon(P, V[ii[batch][need]], V[jj[batch][need]])[0]
        dvals = np.where(vis, E[ii[batch], jj[batch]], hb)
        for b, dv, hv in zip(batch, dvals, hb):
            if hv <= best + tol:
                break
            if dv > best:
                best, pair = float(dv), (int(ii[b]), int(jj[b]))
    return best, (P.vertices[pair[0]], P.vertices[pair[1]])


def _visible_distance_to_segment(P: Polygon, U: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """For each point u, distance to the nearest point of [a;b] that u sees directly."""
    d = b - a
    l2 = float(d @ d)
    out = np.full(len(U), np.inf)
    V = P.arr
    for k, u in enumerate(U):
        cand = [a, b]
        if l2 > 0:
            t = float((u - a) @ d) / l2
            cand.append(a + min(max(t, 0.0), 1.0) * d)
            # shadow boundaries: rays from u through polygon vertices
            r = V - u
            den = r[:, 0] * d[1] - r[:, 1] * d[0]
            ok = np.abs(den) > 1e-300
            num_s = (a[0] - u[0]) * d[1] - (a[1] - u[1]) * d[0]
            num_t = (a[0] - u[0]) * r[:, 1] - (a[1] - u[1]) * r[:, 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                s_ray = np.where(ok, num_s / den, -1.0)
                t_seg = np.where(ok, num_t / den, -1.0)
            good = ok & (s_ray > 0) & (t_seg >= 0) & (t_seg <= 1)
            cand.extend(a + t_seg[good][:, None] * d)
        C = np.asarray(cand)
        vis, _ = segments_in_polygon(P, np.broadcast_to(u, C.shape), C)
        if vis.any():
            out[k] = float(np.min(np.hypot(*(C[vis] - u).T)))
    return out


def geodesic_distance_to_segment(P: Polygon, p, s) -> float:
    p = np.asarray(p, float)
    a, b = np.asarray(s[0], float), np.asarray(s[1], float)
    _check_inside(P, p)
    if not segment_in_polygon(P, (a, b)):
        raise SegmentNotInPolygon("target segment is not inside the polygon", step="geodesic_distance_to_segment")
    g = _graph(P)
    direct = _visible_distance_to_segment(P, p[None], a, b)[0]
    if len(g.K) == 0:
        return float(direct)
    Ap = _to_concave(P, g, p[None])
    Gp = _minplus(Ap, np.asarray(g.D))[0]
    viaK = _visible_distance_to_segment(P, g.K, a, b)
    return float(min(direct, np.min(Gp + viaK)))
