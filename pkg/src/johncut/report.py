"""Run configuration, JSON input/output and re-verifiable reports."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import JohnCutError, MalformedInput
from .geom import Polygon, validate_polygon
from .john import CURVE_SAMPLES, certify_john
from .pipeline import PipelineConfig, certify_piece, constants_for, decompose_polygon, ledger_summary
from .rotund import certify_rotund, inscribed_disk
from .semiconvex import CandidateConfig, certify_semiconvex
from .smooth import DomainInput, decompose_domain


@dataclass(frozen=True)
class RunConfig:
    theta: float = 0.25
    eta: float = 0.05
    epsilon: float | None = None
    rho: float | None = None
    vartheta: float | None = None
    omega: float | None = None
    samples: int = 200
    seed: int = 42
    stress: bool = False

    def __post_init__(self):
        for name in ("theta", "eta", "rho", "vartheta", "omega"):
            v = getattr(self, name)
            if v is not None and not 0 < v < 1:
                raise MalformedInput(f"{name} must lie in (0,1), got {v}", step="config")
        if self.epsilon is not None and self.epsilon <= 0:
            raise MalformedInput("epsilon must be positive", step="config")
        if self.samples < 1:
            raise MalformedInput("samples must be positive", step="config")

    @property
    def density(self) -> int:
        return 4 if self.stress else 1

    @property
    def n_points(self) -> int:
        return self.samples * self.density

    @property
    def search(self) -> CandidateConfig:
        return CandidateConfig().scaled(self.density)

    @property
    def curve_samples(self) -> int:
        return CURVE_SAMPLES * self.density

    def constants(self) -> tuple[float, float, float]:
        """(vartheta, omega, rho) used to certify pipeline pieces; rho defaults to vartheta^3."""
        vt, om, _ = constants_for(self.theta, self.eta)
        vt = self.vartheta if self.vartheta is not None else vt
        om = self.omega if self.omega is not None else om
        rho = self.rho if self.rho is not None else vt**3
        return vt, om, rho


# ---------------------------------------------------------------------------
# JSON


def clean(obj):
    """Plain JSON types: tuples to lists, numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(report: dict) -> str:
    return json.dumps(clean(report), indent=2, sort_keys=True) + "\n"


def polygon_json(P: Polygon, **extra) -> dict:
    return {"type": "polygon", "vertices": [list(v) for v in P.vertices], **extra}


def load_input(path: str | Path):
    """('polygon', Polygon) or ('domain', DomainInput) from a JSON file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"cannot parse {path}: {exc}", step="load_input") from exc
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}", step="load_input") from exc
    return parse_input(data)


def parse_input(data):
    try:
        if isinstance(data, list):
            return "polygon", validate_polygon(data)
        if not isinstance(data, dict):
            raise MalformedInput("input must be an object or a vertex list", step="load_input")
        if "outer" in data:
            return "domain", DomainInput.from_json(data)
        if "vertices" in data:
            return "polygon", validate_polygon(data["vertices"])
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise MalformedInput(f"bad input: {exc}", step="load_input") from exc
    raise MalformedInput("input needs 'vertices' or 'outer'", step="load_input")


# ---------------------------------------------------------------------------
# reports


def decompose_report(kind: str, obj, cfg: RunConfig) -> tuple[dict, dict]:
    """(report, drawing) where drawing holds the geometry for SVG output."""
    t0 = time.perf_counter()
    if kind == "polygon":
        rep, drawing = _polygon_report(obj, cfg)
    else:
        rep, drawing = _domain_report(obj, cfg)
    rep["timing"] = {"seconds": time.perf_counter() - t0}
    return rep, drawing


def _polygon_report(P: Polygon, cfg: RunConfig):
    pcfg = PipelineConfig(theta=cfg.theta, eta=cfg.eta, epsilon=cfg.epsilon, search=cfg.search)
    part = decompose_polygon(P, pcfg)
    vt, om, rho = cfg.constants()
    pieces = [certify_piece(Q, i, vt, om, rho, cfg.n_points, cfg.seed, cfg.search) for i, Q in enumerate(part.pieces)]
    ledger = ledger_summary(part, cfg.theta)
    status = ledger["ledger_pass"] and ledger["exceptional_pass"] and all(p.passed for p in pieces)
    meta = {k: v for k, v in part.meta.items() if k != "seconds"}
    rep = {
        "input": {"type": "polygon", "n_vertices": P.n, "area": P.area, "perimeter": P.perimeter, "vertices": P.vertices},
        "config": asdict(cfg),
        "constants": {"vartheta": vt, "omega": om, "rho": rho},
        "partition": {
            "pieces": [Q.vertices for Q in part.pieces],
            "exceptional": [Q.vertices for Q in part.exceptional],
            "cuts": [c.to_json() for c in part.cuts],
            "meta": meta,
        },
        "ledger": ledger,
        "certificates": [p.to_json() for p in pieces],
        "status": "pass" if status else "fail",
    }
    drawing = {
        "pieces": [Q.arr for Q in part.pieces],
        "exceptional": [Q.arr for Q in part.exceptional],
        "cuts": [(c.v, c.w) for c in part.cuts],
        "disks": [(p.center, p.radius) for p in pieces],
        "curve": _sample_curve(part.pieces, rho, cfg),
    }
    return rep, drawing


def _domain_report(inp: DomainInput, cfg: RunConfig):
    theta = cfg.theta
    dp = decompose_domain(inp, theta, cfg.epsilon, eta=cfg.eta, n_points=cfg.n_points, seed=cfg.seed)
    ok, slack = dp.ledger(theta)
    rho = dp.rho if cfg.rho is None else cfg.rho
    certs = dp.certs if cfg.rho is None else [certify_john(q, rho, cfg.n_points, cfg.seed) for q in dp.pieces]
    status = ok and all(c.passed for c in certs)
    rep = {
        "input": {"type": "domain", "n_outer": len(inp.outer), "holes": len(inp.holes), "area": inp.area,
                  "perimeter": inp.perimeter},
        "config": asdict(cfg),
        "constants": {"rho": rho},
        "partition": {
            "pieces": [Q.vertices for Q in dp.pieces],
            "cuts": [[list(c.a), list(c.b), c.length] for c in dp.cuts],
            "slits": [[list(g.a), list(g.b), g.length] for g in dp.slit_ledger.slits],
            "removed_area": dp.slit_ledger.removed_area,
            "meta": dp.meta,
        },
        "ledger": {"perimeter": inp.perimeter, "boundary_total": dp.boundary_total, "bound": (1 + theta) * inp.perimeter,
                   "ledger_pass": ok, "slack": slack, "area_residual": dp.area_residual()},
        "certificates": [dict(index=i, **c.to_json(with_samples=False)) for i, c in enumerate(certs)],
        "status": "pass" if status else "fail",
    }
    drawing = {
        "pieces": [Q.arr for Q in dp.pieces],
        "exceptional": [],
        "cuts": [(c.a, c.b) for c in dp.cuts],
        "disks": [inscribed_disk(Q) for Q in dp.pieces],
        "curve": _sample_curve(dp.pieces, rho, cfg),
    }
    return rep, drawing


def _sample_curve(pieces, rho: float, cfg: RunConfig):
    """Worst-margin John curve of the largest piece, for drawing."""
    Q = max(pieces, key=lambda q: q.area)
    cert = certify_john(Q, rho, min(cfg.n_points, 32), cfg.seed)
    worst = min((s for s in cert.samples if s.curve is not None), key=lambda s: s.margin, default=None)
    return None if worst is None else worst.curve.polyline()


def certify_report(P: Polygon, check: str, cfg: RunConfig) -> dict:
    if check == "semiconvex":
        param = cfg.vartheta if cfg.vartheta is not None else 0.1
        cert = certify_semiconvex(P, param, cfg.search)
        body = cert.to_json()
    elif check == "rotund":
        param = cfg.omega if cfg.omega is not None else 0.1
        cert = certify_rotund(P, param)
        body = cert.to_json()
    elif check == "john":
        param = cfg.rho if cfg.rho is not None else 0.1
        cert = certify_john(P, param, cfg.n_points, cfg.seed, n_curve_samples=cfg.curve_samples)
        body = cert.to_json()
    else:
        raise MalformedInput(f"unknown check {check!r}", step="certify")
    return {
        "input": polygon_json(P),
        "check": check,
        "param": param,
        "config": asdict(cfg),
        "certificate": body,
        "status": "pass" if cert.passed else "fail",
    }


def verify_report(rep: dict) -> dict:
    """Re-run every recorded check from the report's own data; returns
    {'match': bool, 'mismatches': [...]}."""
    cfg = RunConfig(**rep["config"])
    bad = []
    if "check" in rep:
        P = validate_polygon(rep["input"]["vertices"])
        again = certify_report(P, rep["check"], cfg)
        if again["status"] != rep["status"]:
            bad.append(("status", rep["status"], again["status"]))
        return {"match": not bad, "mismatches": bad}
    if rep["input"]["type"] != "polygon":
        for c, verts in zip(rep["certificates"], rep["partition"]["pieces"]):
            jc = certify_john(validate_polygon(verts), rep["constants"]["rho"], cfg.n_points, cfg.seed)
            if jc.status != c["status"]:
                bad.append((c["index"], "john", c["status"], jc.status))
        return {"match": not bad, "mismatches": bad}
    k = rep["constants"]
    for c, verts in zip(rep["certificates"], rep["partition"]["pieces"]):
        Q = validate_polygon(verts)
        pr = certify_piece(Q, c["index"], k["vartheta"], k["omega"], k["rho"], cfg.n_points, cfg.seed, cfg.search)
        for key in ("semiconvex_pass", "rotund_pass", "john_pass"):
            if getattr(pr, key) != c[key]:
                bad.append((c["index"], key, c[key], getattr(pr, key)))
    return {"match": not bad, "mismatches": bad}


def strip_timing(rep: dict) -> dict:
    return {k: v for k, v in rep.items() if k != "timing"}


__all__ = ["RunConfig", "load_input", "parse_input", "decompose_report", "certify_report", "verify_report", "dumps",
           "clean", "polygon_json", "strip_timing", "JohnCutError"]
