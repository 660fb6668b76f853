"""Semiconvexity: segmentation properties, certification and the cut loop.

A chord [v;w] from a concave vertex v violates ϑ-semiconvexity when
|[v;w]| < ϑ·min_k d(Q_k). The search runs over a finite candidate set of w
per concave vertex and prunes with two cheap bounds on the ratio:
  d(Q) <= perimeter(Q)/2   gives a lower bound on the ratio,
  d(Q) >= Euclidean diameter gives an upper bound.
Exact intrinsic diameters are computed only when the bounds straddle the
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import ChordInvalid, IterationLimitExceeded, JohnCutError
from .geodesic import intrinsic_diameter
from .geom import Polygon, cigar_margin, segments_in_polygon, visible_from_chord
from .partition import Chord, Partition, SplitResult, select_Qvw, split_at, split_by_chord


@dataclass(frozen=True)
class CandidateConfig:
    n_samples: int = 256
    vertices: bool = True
    rays: bool = True
    feet: bool = True

    def scaled(self, factor: int) -> "CandidateConfig":
        return replace(self, n_samples=self.n_samples * factor)


@dataclass(frozen=True)
class SemiconvexParams:
    theta: float = 0.25
    eta: float = 0.05
    eta_max: float = 0.5
    search: CandidateConfig = field(default_factory=CandidateConfig)
    max_iterations: int | None = None

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0,1)")
        if not 0 < self.eta <= self.eta_max or self.eta >= 1:
            raise ValueError("eta must lie in (0, eta_max]")

    @property
    def cut_ratio(self) -> float:
        """Violation threshold used by the cut search (θ/2)."""
        return self.theta / 2

    @property
    def vartheta(self) -> float:
        """Semiconvexity target, capped at η/2 as the equivalence argument requires."""
        return min(self.theta / 2, self.eta / 2)

    @property
    def vartheta_bar(self) -> float:
        return 1.0 / (3.0 + 12.0 / self.vartheta)

    @property
    def vartheta_tilde(self) -> float:
        return self.vartheta_bar * self.eta / (4 * self.eta + 2)

    @property
    def alpha_eta(self) -> float:
        return 0.5 * math.asin(self.eta)

    @property
    def piece_vartheta(self) -> float:
        """Constant every output piece is guaranteed to certify at."""
        return 1.0 / (3.0 + 12.0 / self.vartheta_tilde)


@dataclass(frozen=True)
class SemiconvexCert:
    vartheta: float
    status: str
    counterexample: tuple[Chord, float] | None
    candidate_stats: int
    density: int

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {"vartheta": self.vartheta, "status": self.status, "candidates": self.candidate_stats, "density": self.density}
        if self.counterexample is not None:
            ch, d = self.counterexample
            out["counterexample"] = {"chord": ch.to_json(), "min_diameter": d}
        return out


# ---------------------------------------------------------------------------
# candidate chords


@dataclass
class _Cands:
    vi: np.ndarray
    W: np.ndarray
    kind: np.ndarray  # 0 vertex, 1 edge
    idx: np.ndarray
    t: np.ndarray
    length: np.ndarray
    lb: np.ndarray


def _edge_locs(P: Polygon, s: np.ndarray):
    s = np.mod(s, P.perimeter)
    k = np.clip(np.searchsorted(P.cum_length, s, side="right") - 1, 0, P.n - 1)
    ln = P.edge_lengths[k]
    t = np.where(ln > 0, (s - P.cum_length[k]) / np.where(ln > 0, ln, 1), 0.0)
    return k, t


def _ray_hits(P: Polygon, v: np.ndarray, U: np.ndarray):
    """First boundary hit beyond u of the ray from v through each u: (edge, t) or -1."""
    V, E = P.arr, P.edge_vectors
    r = U - v
    rl = np.hypot(r[:, 0], r[:, 1])
    den = r[:, None, 0] * E[None, :, 1] - r[:, None, 1] * E[None, :, 0]
    qx = V[None, :, 0] - v[0]
    qy = V[None, :, 1] - v[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (qx * E[None, :, 1] - qy * E[None, :, 0]) / den
        t = (qx * r[:, None, 1] - qy * r[:, None, 0]) / den
    ok = (np.abs(den) > 1e-300) & (s > 1 + P.eps / rl[:, None]) & (t >= 0) & (t <= 1)
    s = np.where(ok, s, np.inf)
    k = np.argmin(s, axis=1)
    rows = np.arange(len(U))
    hit = np.isfinite(s[rows, k])
    return np.where(hit, k, -1), np.where(hit, t[rows, k], 0.0)


def _candidates_for(P: Polygon, vi: int, cfg: CandidateConfig):
    n, V, E, El = P.n, P.arr, P.edge_vectors, P.edge_lengths
    v = V[vi]
    kinds, idxs, ts = [], [], []
    if cfg.vertices:
        j = np.array([j for j in range(n) if j not in (vi, (vi - 1) % n, (vi + 1) % n)], int)
        kinds.append(np.zeros(len(j), int))
        idxs.append(j)
        ts.append(np.zeros(len(j)))
    if cfg.feet:
        t = np.einsum("ij,ij->i", v - V, E) / np.maximum(El**2, 1e-300)
        k = np.nonzero((t > 0) & (t < 1))[0]
        kinds.append(np.ones(len(k), int))
        idxs.append(k)
        ts.append(t[k])
    if cfg.rays:
        others = np.array([j for j in range(n) if j != vi], int)
        vis, _ = segments_in_polygon(P, np.broadcast_to(v, (len(others), 2)), V[others])
        U = V[others[vis]]
        if len(U):
            k, t = _ray_hits(P, v, U)
            good = k >= 0
            k, t = k[good], t[good]
            delta = 1e-6 * P.perimeter / np.maximum(El[k], 1e-300)
            for tt in (t, t - delta, t + delta):
                ok = (tt > 0) & (tt < 1)
                kinds.append(np.ones(int(ok.sum()), int))
                idxs.append(k[ok])
                ts.append(tt[ok])
    if cfg.n_samples:
        s = (np.arange(cfg.n_samples) + 0.5) * P.perimeter / cfg.n_samples
        k, t = _edge_locs(P, s)
        kinds.append(np.ones(len(k), int))
        idxs.append(k)
        ts.append(t)
    kind = np.concatenate(kinds) if kinds else np.zeros(0, int)
    idx = np.concatenate(idxs) if idxs else np.zeros(0, int)
    t = np.concatenate(ts) if ts else np.zeros(0)
    # snap edge points near vertices
    e = kind == 1
    near0 = e & (t * El[idx] <= P.eps)
    near1 = e & ((1 - t) * El[idx] <= P.eps)
    idx = np.where(near1, (idx + 1) % n, idx)
    kind = np.where(near0 | near1, 0, kind)
    t = np.where(kind == 0, 0.0, t)
    incident = ((kind == 1) & ((idx == vi) | (idx == (vi - 1) % n))) | (
        (kind == 0) & ((idx == vi) | (idx == (vi - 1) % n) | (idx == (vi + 1) % n))
    )
    kind, idx, t = kind[~incident], idx[~incident], t[~incident]
    # dedupe
    key = np.round(np.stack([kind, idx, t * 1e12]), 0).T
    _, first = np.unique(key, axis=0, return_index=True)
    first.sort()
    kind, idx, t = kind[first], idx[first], t[first]
    W = np.where((kind == 0)[:, None], V[idx], V[idx] + t[:, None] * E[idx])
    sw = P.cum_length[idx] + np.where(kind == 1, t * El[idx], 0.0)
    return kind, idx, t, W, sw


@lru_cache(maxsize=256)
def _all_candidates(P: Polygon, cfg: CandidateConfig) -> _Cands:
    parts = []
    Ltot = P.perimeter
    for vi in P.concave:
        kind, idx, t, W, sw = _candidates_for(P, vi, cfg)
        if len(W) == 0:
            continue
        v = P.arr[vi]
        length = np.hypot(*(W - v).T)
        l1 = np.mod(sw - P.cum_length[vi], Ltot)
        per = np.minimum(l1, Ltot - l1) + length
        lb = length / (0.5 * per)
        parts.append((np.full(len(W), vi), W, kind, idx, t, length, lb))
    if not parts:
        z = np.zeros(0)
        return _Cands(z.astype(int), np.zeros((0, 2)), z.astype(int), z.astype(int), z, z, z)
    cols = list(zip(*parts))
    c = _Cands(*(np.concatenate(col) for col in cols))
    order = np.lexsort((c.length, c.lb))
    return _Cands(*(getattr(c, f)[order] for f in ("vi", "W", "kind", "idx", "t", "length", "lb")))


def _valid_mask(P: Polygon, c: _Cands, sel: np.ndarray) -> np.ndarray:
    if len(sel) == 0:
        return np.zeros(0, bool)
    inside, touches = segments_in_polygon(P, P.arr[c.vi[sel]], c.W[sel])
    return inside & ~touches


def _eucl_diam(Q: Polygon) -> float:
    a = Q.arr
    d = a[:, None, :] - a[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))


def _split(P: Polygon, c: _Cands, i: int) -> SplitResult:
    vi = int(c.vi[i])
    loc_w = ("vertex", int(c.idx[i])) if c.kind[i] == 0 else ("edge", int(c.idx[i]), float(c.t[i]))
    return split_at(P, ("vertex", vi), loc_w, P.vertices[vi], tuple(map(float, c.W[i])))


def _violates(sr: SplitResult, length: float, thr: float) -> tuple[bool, float | None]:
    """Decide length < thr * min_k d(Q_k); returns (violates, exact min diameter if computed)."""
    small, big = sorted((sr.q1, sr.q2), key=lambda q: q.perimeter)
    if length >= thr * 0.5 * small.perimeter:
        return False, None
    ds = intrinsic_diameter(small)[0]
    if length >= thr * ds:
        return False, None
    if length < thr * _eucl_diam(big):
        return True, None
    if length >= thr * 0.5 * big.perimeter:
        return False, None
    db = intrinsic_diameter(big)[0]
    return length < thr * db, min(ds, db)


def _min_diam(sr: SplitResult) -> float:
    return min(intrinsic_diameter(sr.q1)[0], intrinsic_diameter(sr.q2)[0])


def certify_semiconvex(P: Polygon, vartheta: float, search: CandidateConfig | None = None) -> SemiconvexCert:
    search = search or CandidateConfig()
    if P.is_convex:
        return SemiconvexCert(vartheta, "pass", None, 0, search.n_samples)
    c = _all_candidates(P, search)
    sel = np.nonzero(c.lb < vartheta)[0]
    valid = _valid_mask(P, c, sel)
    examined = 0
    for i in sel[valid]:
        examined += 1
        sr = _split(P, c, i)
        bad, _ = _violates(sr, float(c.length[i]), vartheta)
        if bad:
            md = _min_diam(sr)
            return SemiconvexCert(vartheta, "fail", (sr.chord, md), examined, search.n_samples)
    return SemiconvexCert(vartheta, "pass", None, int(len(c.lb)), search.n_samples)


@lru_cache(maxsize=1024)
def semiconvexity_ratio(P: Polygon, cap: float = 1.0, search: CandidateConfig | None = None):
    """Smallest |chord| / min_k d(Q_k) over candidate chords, capped; (ratio, chord or None)."""
    search = search or CandidateConfig()
    if P.is_convex:
        return cap, None
    c = _all_candidates(P, search)
    sel = np.nonzero(c.lb < cap)[0]
    valid = _valid_mask(P, c, sel)
    best, witness = cap, None
    for i in sel[valid]:
        if c.lb[i] >= best:
            break
        sr = _split(P, c, i)
        small = min(sr.q1, sr.q2, key=lambda q: q.perimeter)
        # d(Q) <= H1(dQ)/2 gives a free upper bound before the exact diameter
        if c.length[i] >= best * small.perimeter / 2 or c.length[i] >= best * intrinsic_diameter(small)[0]:
            continue
        r = float(c.length[i]) / _min_diam(sr)
        if r < best:
            best, witness = r, sr.chord
    return best, witness


# ---------------------------------------------------------------------------
# segmentation properties


def _concave_on_sides(P: Polygon, sr: SplitResult, exclude: set[int]):
    """Concave vertex indices of P on the Q1 side and on the Q2 side."""
    q1 = set(sr.q1.vertices[1:-1])
    s1, s2 = [], []
    for c in P.concave:
        if c in exclude:
            continue
        (s1 if P.vertices[c] in q1 else s2).append(c)
    return s1, s2


def _cigar_hits(P: Polygon, v, w, eta: float, idx: list[int]) -> list[int]:
    if not idx:
        return []
    pts = P.arr[idx]
    near = [i for i, x in zip(idx, pts) if cigar_margin(v, w, eta, x) <= P.eps]
    if not near:
        return []
    vis = visible_from_chord(P, v, w, eta, P.arr[near])
    return [i for i, ok in zip(near, vis) if ok]


def _triangle_ok(sr: SplitResult, alpha: float) -> bool:
    for q in (sr.q1, sr.q2):
        if q.n == 3 and q.angles[q.vertices.index(sr.chord.v)] <= alpha:
            return False
    return True


def _endpoints_idx(P: Polygon, sr: SplitResult) -> set[int]:
    out = set()
    for p in (sr.chord.v, sr.chord.w):
        loc = P.locate(p)
        if loc and loc[0] == "vertex":
            out.add(loc[1])
    return out


def _sp_wsp(P: Polygon, sr: SplitResult, eta: float, weak: bool) -> bool:
    alpha = 0.5 * math.asin(eta)
    if not _triangle_ok(sr, alpha):
        return False
    s1, s2 = _concave_on_sides(P, sr, _endpoints_idx(P, sr))
    if weak:
        side = select_Qvw(sr)
        idx = s1 if side == "Q1" else s2 if side == "Q2" else s1 + s2
    else:
        idx = s1 + s2
    return not _cigar_hits(P, sr.chord.v, sr.chord.w, eta, idx)


def _chord_split(P: Polygon, chord) -> SplitResult:
    v, w = (chord.v, chord.w) if isinstance(chord, Chord) else chord
    loc = P.locate(v)
    if loc is None or loc[0] != "vertex" or loc[1] not in P.concave:
        raise ChordInvalid("chord must start at a concave vertex", step="check_SP")
    try:
        return split_by_chord(P, v, w)
    except JohnCutError as exc:
        raise ChordInvalid(str(exc), step="check_SP") from exc


def check_SP(P: Polygon, chord, eta: float) -> bool:
    return _sp_wsp(P, _chord_split(P, chord), eta, weak=False)


def check_WSP(P: Polygon, chord, eta: float) -> bool:
    return _sp_wsp(P, _chord_split(P, chord), eta, weak=True)


def check_part_seg_criterion(P: Polygon, chord, alpha: float, side: int = 1) -> bool:
    """Every concave vertex u of the chosen side sees the chord under a base angle >= alpha."""
    v, w = (chord.v, chord.w) if isinstance(chord, Chord) else chord
    try:
        sr = split_by_chord(P, v, w)
    except JohnCutError as exc:
        raise ChordInvalid(str(exc), step="check_part_seg_criterion") from exc
    P1 = sr.q1 if side == 1 else sr.q2
    u1, u2 = np.asarray(sr.chord.v), np.asarray(sr.chord.w)
    for k in P1.concave:
        x = P1.arr[k]
        if np.allclose(x, u1) or np.allclose(x, u2):
            continue
        a1 = _angle(u2 - u1, x - u1)
        a2 = _angle(u1 - u2, x - u2)
        if max(a1, a2) < alpha:
            return False
    return True


def _angle(a, b) -> float:
    return math.atan2(abs(a[0] * b[1] - a[1] * b[0]), float(a @ b))


# ---------------------------------------------------------------------------
# cut selection and decomposition


@dataclass(frozen=True)
class CutChoice:
    chord: Chord
    split: SplitResult  # q1 is the side cut off
    n_prime: int
    length_bound_ok: bool


def _oriented(sr: SplitResult, side: str) -> SplitResult:
    if side == "Q2":
        return SplitResult(sr.q2, sr.q1, sr.chord, sr.n2, sr.n1)
    return sr


def _perturb(P: Polygon, sr: SplitResult) -> SplitResult:
    """Slide w off a convex vertex of P by 10 eps, into the cut-off side."""
    loc = P.locate(sr.chord.w)
    if loc is None or loc[0] != "vertex" or loc[1] in P.concave:
        return sr
    j = loc[1]
    inner = set(sr.q1.vertices)
    nb = [P.vertices[(j + s) % P.n] for s in (-1, 1)]
    nb = [u for u in nb if u in inner and u != sr.chord.v]
    if len(nb) != 1:
        return sr
    b, a = P.arr[j], np.asarray(nb[0])
    d = a - b
    w2 = tuple(map(float, b + 10 * P.eps / float(np.hypot(*d)) * d))
    try:
        new = split_by_chord(P, sr.chord.v, w2)
    except JohnCutError:
        return sr
    return _oriented(new, "Q1" if nb[0] in set(new.q1.vertices) else "Q2")


def find_splitting_chord(P: Polygon, params: SemiconvexParams | None = None) -> CutChoice | None:
    """Violating (WSP) chord with the fewest concave vertices on the cut-off side, or None."""
    params = params or SemiconvexParams()
    if P.is_convex:
        return None
    thr = params.cut_ratio
    c = _all_candidates(P, params.search)
    sel = np.nonzero(c.lb < thr)[0]
    valid = _valid_mask(P, c, sel)
    options = []
    for i in sel[valid]:
        sr = _split(P, c, i)
        if min(sr.q1.area, sr.q2.area) <= P.eps * P.diag:
            continue
        bad, _ = _violates(sr, float(c.length[i]), thr)
        if not bad:
            continue
        side = select_Qvw(sr)
        if not _sp_wsp(P, sr, params.eta, weak=True):
            continue
        sides = ["Q1", "Q2"] if side == "Both" else [side]
        for s in sides:
            o = _oriented(sr, s)
            options.append(((o.n1, o.q1.area, float(c.length[i]), int(c.vi[i]), tuple(c.W[i])), o))
    options.sort(key=lambda it: it[0])
    for _, o in options:
        o = _perturb(P, o)
        cert = certify_semiconvex(o.q1, params.vartheta_tilde, params.search)
        if not cert.passed:
            continue
        rest = o.q1.perimeter - o.chord.length
        return CutChoice(o.chord, o, o.n1, o.chord.length <= params.theta * rest + P.eps)
    return None


def decompose_semiconvex(P: Polygon, params: SemiconvexParams | None = None) -> Partition:
    params = params or SemiconvexParams()
    cap = params.max_iterations or (8 * P.n + 64)
    pieces, cuts, info = [], [], []
    R = P
    for _ in range(cap):
        choice = find_splitting_chord(R, params)
        if choice is None:
            pieces.append(R)
            break
        pieces.append(choice.split.q1)
        cuts.append(choice.chord)
        info.append({"n_prime": choice.n_prime, "length_bound_ok": choice.length_bound_ok})
        R = choice.split.q2
    else:
        raise IterationLimitExceeded(f"no convergence after {cap} cuts", step="decompose_semiconvex")
    return Partition(P, tuple(pieces), (), tuple(cuts), {"cuts": info, "theta": params.theta, "eta": params.eta})
