"""SVG rendering of partitions: pieces, cuts, exceptional set, disks, one John curve."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

SIZE = 1000.0
MARGIN = 0.02
PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#edc948", "#b07aa1", "#76b7b2", "#ff9da7", "#9c755f", "#bab0ac", "#e15759")
CUT_COLOR = "#d62728"
EXCEPTIONAL_COLOR = "#9a9a9a"
CURVE_COLOR = "#111111"


class _Fit:
    """Uniform scale into the square viewbox with y pointing up."""

    def __init__(self, pts: np.ndarray):
        lo, hi = pts.min(0), pts.max(0)
        span = max(float((hi - lo).max()), 1e-300)
        inner = SIZE * (1 - 2 * MARGIN)
        self.k = inner / span
        self.off = SIZE * MARGIN + (inner - (hi - lo) * self.k) / 2
        self.lo = lo

    def __call__(self, pts) -> np.ndarray:
        q = (np.asarray(pts, float) - self.lo) * self.k + self.off
        q[..., 1] = SIZE - q[..., 1]
        return q

    def length(self, r: float) -> float:
        return r * self.k


def _path(q: np.ndarray, closed: bool = True) -> str:
    s = "M " + " L ".join(f"{x:.3f},{y:.3f}" for x, y in q)
    return s + (" Z" if closed else "")


def render(pieces, exceptional=(), cuts=(), disks=(), curve=None, title: str = "") -> str:
    """pieces/exceptional: vertex arrays; cuts: (a, b) pairs; disks: ((cx, cy), r); curve: polyline."""
    rings = [np.asarray(p, float) for p in pieces] + [np.asarray(p, float) for p in exceptional]
    fit = _Fit(np.vstack(rings))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE:.0f} {SIZE:.0f}" width="{SIZE:.0f}" height="{SIZE:.0f}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<g id="pieces" data-count="{len(pieces)}">')
    for i, p in enumerate(pieces):
        col = PALETTE[i % len(PALETTE)]
        out.append(f'<path class="piece" data-index="{i}" d="{_path(fit(p))}" fill="{col}" fill-opacity="0.55" '
                   f'stroke="#333333" stroke-width="0.8"/>')
    out.append("</g>")
    out.append('<g id="exceptional">')
    for p in exceptional:
        out.append(f'<path class="exceptional" d="{_path(fit(p))}" fill="{EXCEPTIONAL_COLOR}" stroke="{EXCEPTIONAL_COLOR}" stroke-width="0.8"/>')
    out.append("</g>")
    out.append('<g id="cuts">')
    for a, b in cuts:
        q = fit(np.array([a, b], float))
        out.append(f'<line class="cut" x1="{q[0, 0]:.3f}" y1="{q[0, 1]:.3f}" x2="{q[1, 0]:.3f}" y2="{q[1, 1]:.3f}" '
                   f'stroke="{CUT_COLOR}" stroke-width="1.6"/>')
    out.append("</g>")
    out.append('<g id="disks">')
    for c, r in disks:
        q = fit(np.array([c], float))[0]
        out.append(f'<circle class="disk" cx="{q[0]:.3f}" cy="{q[1]:.3f}" r="{fit.length(r):.3f}" fill="none" '
                   f'stroke="#222222" stroke-dasharray="4 3" stroke-width="0.8"/>')
    out.append("</g>")
    if curve is not None and len(curve) >= 2:
        out.append(f'<path id="john-curve" d="{_path(fit(curve), closed=False)}" fill="none" stroke="{CURVE_COLOR}" stroke-width="1.4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
