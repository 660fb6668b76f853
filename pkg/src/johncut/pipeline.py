"""Full polygon decomposition: semiconvex cuts, then rotund pieces, then certificates."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .geom import Polygon
from .john import certify_john, john_constant
from .partition import Chord, Partition, ledger_check
from .rotund import certify_rotund, decompose_rotund, inscribed_disk, rotundity
from .semiconvex import CandidateConfig, SemiconvexParams, certify_semiconvex, decompose_semiconvex, semiconvexity_ratio

# Corpus-wide constants measured once per theta at eta=0.05 on fixtures.corpus()
# (minimum over all output pieces, rounded down to two digits) and then frozen.
# Keys: theta -> (vartheta_out, omega_out, rho_min).
CALIBRATED = {
    0.25: (0.038, 0.010, 0.0038),
    0.5: (0.056, 0.0073, 0.0050),
}
SLACK = 1 - 1e-9
RATIO_CAP = 0.25  # semiconvexity ratios are only resolved below this value


def stage_budgets(theta: float) -> tuple[float, float]:
    """Split theta between the semiconvex stage and the rotund stage."""
    return theta / (4 + theta), theta / (2 * (2 + theta))


@dataclass(frozen=True)
class PipelineConfig:
    theta: float = 0.25
    eta: float = 0.05
    epsilon: float | None = None  # defaults to 0.01 * perimeter
    search: CandidateConfig = field(default_factory=CandidateConfig)
    aspect_factor: float = 7.0
    stop_factor: float = 4.0

    def __post_init__(self):
        for name in ("theta", "eta"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0,1)")

    def eps_for(self, P: Polygon) -> float:
        return 0.01 * P.perimeter if self.epsilon is None else self.epsilon


def constants_for(theta: float, eta: float = 0.05) -> tuple[float, float, float]:
    """(vartheta_out, omega_out, rho_min) for the pipeline at theta.

    Frozen values for calibrated thetas, otherwise the conservative stage guarantees."""
    key = round(theta, 12)
    if key in CALIBRATED and math.isclose(eta, 0.05):
        return CALIBRATED[key]
    ts, _ = stage_budgets(theta)
    vt = SemiconvexParams(theta=ts, eta=eta).piece_vartheta
    return vt, vt**2 / 14, vt**3


def decompose_polygon(P: Polygon, cfg: PipelineConfig | None = None) -> Partition:
    cfg = cfg or PipelineConfig()
    t0 = time.perf_counter()
    theta_s, theta_r = stage_budgets(cfg.theta)
    eps = cfg.eps_for(P)
    stage1 = decompose_semiconvex(P, SemiconvexParams(theta=theta_s, eta=cfg.eta, search=cfg.search))
    B1 = stage1.boundary_total
    pieces: list[Polygon] = []
    exceptional: list[Polygon] = []
    cuts: list[Chord] = list(stage1.cuts)
    per_piece = []
    for Q in stage1.pieces:
        vt, _ = semiconvexity_ratio(Q, RATIO_CAP, cfg.search)
        vt *= SLACK
        sub = decompose_rotund(Q, theta_r, vt, eps * Q.perimeter / B1, None, cfg.aspect_factor, cfg.stop_factor, cfg.search)
        pieces.extend(sub.pieces)
        exceptional.extend(sub.exceptional)
        cuts.extend(sub.cuts)
        per_piece.append({"vartheta": vt, "pieces": len(sub.pieces), "exceptional": len(sub.exceptional)})
    meta = {
        "theta": cfg.theta,
        "eta": cfg.eta,
        "epsilon": eps,
        "theta_semiconvex": theta_s,
        "theta_rotund": theta_r,
        "stage1_pieces": len(stage1.pieces),
        "stage1_cuts": len(stage1.cuts),
        "stage2": per_piece,
        "seconds": time.perf_counter() - t0,
    }
    return Partition(P, tuple(pieces), tuple(exceptional), tuple(cuts), meta)


@dataclass(frozen=True)
class PieceReport:
    index: int
    area: float
    perimeter: float
    semiconvex_ratio: float
    rotundity: float
    center: tuple[float, float]
    radius: float
    semiconvex_pass: bool
    rotund_pass: bool
    john_pass: bool
    john_rho: float
    john_worst_margin: float
    john_constant: float | None = None

    @property
    def passed(self) -> bool:
        return self.semiconvex_pass and self.rotund_pass and self.john_pass

    def to_json(self) -> dict:
        return dict(self.__dict__)


def certify_piece(Q: Polygon, index: int, vartheta: float, omega: float, rho: float, n_points: int = 200,
                  seed: int = 42, search: CandidateConfig | None = None, with_constant: bool = False) -> PieceReport:
    sc = certify_semiconvex(Q, vartheta, search)
    rc = certify_rotund(Q, omega)
    center, radius = inscribed_disk(Q)
    jc = certify_john(Q, rho, n_points, seed, center=center)
    sr, _ = semiconvexity_ratio(Q, RATIO_CAP, search)
    jk = john_constant(Q, n_points, seed, center=center)[0] if with_constant else None
    return PieceReport(index, Q.area, Q.perimeter, float(sr), rotundity(Q), (float(center[0]), float(center[1])),
                       float(radius), sc.passed, rc.passed, jc.passed, rho, jc.worst_margin, jk)


def ledger_summary(part: Partition, theta: float) -> dict:
    ok, slack = ledger_check(part, theta)
    H = part.source.perimeter
    eps = part.meta.get("epsilon", 0.01 * H)
    return {
        "perimeter": H,
        "boundary_total": part.boundary_total,
        "bound": (1 + theta) * H,
        "ledger_pass": ok,
        "slack": slack,
        "exceptional_boundary": part.exceptional_boundary,
        "exceptional_pass": part.exceptional_boundary <= eps * (1 + 1e-12),
        "cut_total": part.cut_total,
        "identity_residual": part.identity_residual(),
        "area_residual": part.area_residual(),
    }
