"""
Cross-construction checks run by ``idealcore verify`` and the test suite.

Each check returns plain numbers; thresholds are applied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import qmc

from . import defaults
from .cluster import ClusterSet, _data_box, estimate_clusters
from .core import (
    BallCore,
    CoreReport,
    ball_characterization,
    core_by_balls,
    core_by_cluster_hull,
    core_by_support,
)
from .corpus import CorpusItem, perturb
from .geometry import Polytope, distance_to_hull, hausdorff_distance

__all__ = [
    "Constructions",
    "ProbeAgreement",
    "build_constructions",
    "cluster_containment",
    "perturbation_gaps",
    "probe_agreement",
    "probe_points",
    "signed_boundary_distance",
    "verify_item",
]


@dataclass(frozen=True)
class Constructions:
    support: CoreReport
    cluster: CoreReport
    ball: CoreReport
    clusters: ClusterSet
    balls: BallCore


def build_constructions(
    x,
    I,
    delta: float = defaults.DELTA,
    eps_final: float = defaults.EPS_FINAL,
    *,
    directions: Optional[int] = None,
    centers: int = defaults.BALL_CENTERS,
    bound: Optional[float] = defaults.BOUND,
    box=None,
) -> Constructions:
    """All three core constructions on one window."""
    sup = core_by_support(x, I, directions, delta, bound=bound)
    C = estimate_clusters(x, I, eps_final, box=box, bound=bound)
    hull = core_by_cluster_hull(x, I, eps_final, box=box, bound=bound, clusters=C)
    B = ball_characterization(x, I, centers, delta, bound=bound, directions=directions)
    ball = core_by_balls(x, I, centers, delta, directions, bound=bound, balls=B)
    return Constructions(sup, hull, ball, C, B)


def probe_points(P: Polytope, count: int = 1000) -> np.ndarray:
    """Halton points filling the bounding box of ``P`` inflated by half its extent (at least 0.5)."""
    lo, hi = P.bounding_box()
    ext = hi - lo
    pad = np.maximum(0.5 * ext, 0.5)
    H = qmc.Halton(d=P.dim, scramble=False).random(count)
    return lo - pad + H * (ext + 2 * pad)


def signed_boundary_distance(P: Polytope, p) -> float:
    """Distance from ``p`` to the boundary of ``P``; negative inside."""
    p = np.asarray(p, dtype=float)
    if np.all(P.normals @ p <= P.offsets):
        return -float(np.min(P.offsets - P.normals @ p))
    return distance_to_hull(p, P.vertices)


@dataclass(frozen=True)
class ProbeAgreement:
    probes: int
    agree: float
    disagreements: int
    max_shell: float

    def passed(self, min_agree: float, shell: float) -> bool:
        return self.agree >= min_agree and self.max_shell <= shell


def probe_agreement(support: CoreReport, balls: BallCore, count: int = 1000) -> ProbeAgreement:
    """Ball-test verdicts against support-polytope membership on probe points.

    Polytope membership allows the same slack ``delta`` as the ball test.
    ``max_shell`` is the largest distance from a disagreeing probe to the
    polytope boundary.
    """
    P = support.result
    H = probe_points(P, count)
    a = P.contains(H, tol=balls.delta)
    b = balls.contains(H)
    bad = np.flatnonzero(a != b)
    shell = max((abs(signed_boundary_distance(P, H[i])) for i in bad), default=0.0)
    return ProbeAgreement(len(H), 1.0 - len(bad) / len(H), int(len(bad)), float(shell))


def cluster_containment(cons: Constructions, tol: float) -> tuple[float, float]:
    """Fractions of cluster candidates inside the support core and the ball region, within ``tol``."""
    pts = cons.clusters.points
    if len(pts) == 0:
        return 1.0, 1.0
    in_sup = cons.support.result.contains(pts, tol=tol)
    in_ball = cons.balls.contains(pts, slack=tol)
    return float(np.mean(in_sup)), float(np.mean(in_ball))


def perturbation_gaps(
    item: CorpusItem,
    base: Constructions,
    delta: float = defaults.DELTA,
    eps_final: float = defaults.EPS_FINAL,
    seed: int = 0,
) -> dict[str, float]:
    """Hausdorff change of each construction after noise on a small index set.

    The cluster search reuses the unperturbed search box so both runs share
    one cell lattice.
    """
    x = item.window()
    I = item.model()
    y = perturb(x, item.small_set(), seed=seed)
    box = _data_box(x, defaults.BOUND)
    pert = build_constructions(y, I, delta, eps_final, box=box)
    return {
        "support": hausdorff_distance(base.support.result, pert.support.result),
        "cluster_hull": _hausdorff_or_empty(base.cluster.result, pert.cluster.result),
        "ball": hausdorff_distance(base.ball.result, pert.ball.result),
    }


def _hausdorff_or_empty(P: Polytope, Q: Polytope) -> float:
    if P.is_empty and Q.is_empty:
        return 0.0
    if P.is_empty or Q.is_empty:
        return float("inf")
    return hausdorff_distance(P, Q)


def verify_item(
    item: CorpusItem,
    delta: float = defaults.DELTA,
    eps_final: float = defaults.EPS_FINAL,
    tol_equiv: Optional[float] = None,
) -> dict:
    """Run the invariant suite on one corpus item."""
    tol = defaults.tol_equiv(delta, eps_final) if tol_equiv is None else tol_equiv
    x = item.window()
    I = item.model()
    cons = build_constructions(x, I, delta, eps_final)
    gap = _hausdorff_or_empty(cons.support.result, cons.cluster.result)
    probes = probe_agreement(cons.support, cons.balls)
    in_sup, in_ball = cluster_containment(cons, tol)
    pert = perturbation_gaps(item, cons, delta, eps_final)
    checks = {
        "support_vs_cluster_hull": {"hausdorff": gap, "limit": tol, "pass": gap <= tol},
        "ball_probe_agreement": {
            "agree": probes.agree,
            "max_shell": probes.max_shell,
            "min_agree": 0.99,
            "shell": tol,
            "pass": probes.passed(0.99, tol),
        },
        "clusters_inside_cores": {
            "support_fraction": in_sup,
            "ball_fraction": in_ball,
            "pass": in_sup == 1.0 and in_ball == 1.0,
        },
        "small_set_perturbation": {
            **{f"{k}_hausdorff": v for k, v in pert.items()},
            "limit": tol,
            "pass": all(v <= tol for v in pert.values()),
        },
    }
    return {
        "item": item.name,
        "sequence": item.sequence,
        "model": I.name,
        "scale": item.scale,
        "tol_equiv": tol,
        "checks": checks,
        "pass": all(c["pass"] for c in checks.values()),
    }
