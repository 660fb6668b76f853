"""Orientation predicates with a floating-point filter and an exact fallback.

The float path is accepted when the determinant clears a forward error bound
of the same form as Shewchuk's first-stage orient2d filter. Anything inside
the bound is recomputed with rationals, so signs are always exact.
"""

from fractions import Fraction

import numpy as np

_EPS = np.finfo(float).eps / 2.0  # unit roundoff, 2**-53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(t) for t in (ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orient2d(a, b, c) -> int:
    """Sign of the signed area of triangle abc: +1 left turn, -1 right turn, 0 collinear."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    left = (ax - cx) * (by - cy)
    right = (ay - cy) * (bx - cx)
    det = left - right
    bound = _CCW_BOUND * (abs(left) + abs(right))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _orient_exact(ax, ay, bx, by, cx, cy)


def orient2d_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorised orient2d over broadcastable (..., 2) arrays; exact on ambiguous entries."""
    a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
    left = (a[..., 0] - c[..., 0]) * (b[..., 1] - c[..., 1])
    right = (a[..., 1] - c[..., 1]) * (b[..., 0] - c[..., 0])
    det = left - right
    bound = _CCW_BOUND * (np.abs(left) + np.abs(right))
    out = np.where(det > bound, 1, np.where(-det > bound, -1, 0)).astype(np.int8)
    unsure = np.argwhere(np.abs(det) <= bound)
    for idx in map(tuple, unsure):
        out[idx] = _orient_exact(*a[idx], *b[idx], *c[idx])
    return out


def _on_closed_segment(p, q, r) -> bool:
    # r collinear with pq is assumed; check it lies within the bounding box
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed segments [p1;p2] and [q1;q2] share at least one point (exact)."""
    o1 = orient2d(p1, p2, q1)
    o2 = orient2d(p1, p2, q2)
    o3 = orient2d(q1, q2, p1)
    o4 = orient2d(q1, q2, p2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_closed_segment(p1, p2, q1):
        return True
    if o2 == 0 and _on_closed_segment(p1, p2, q2):
        return True
    if o3 == 0 and _on_closed_segment(q1, q2, p1):
        return True
    if o4 == 0 and _on_closed_segment(q1, q2, p2):
        return True
    return False


def segments_cross_properly(p1, p2, q1, q2) -> bool:
    """Interiors cross at a single point that is not an endpoint of either segment."""
    o1 = orient2d(p1, p2, q1)
    o2 = orient2d(p1, p2, q2)
    o3 = orient2d(q1, q2, p1)
    o4 = orient2d(q1, q2, p2)
    return o1 * o2 < 0 and o3 * o4 < 0
