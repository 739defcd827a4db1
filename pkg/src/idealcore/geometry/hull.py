"""
Hull membership with certificates, nearest points and Hausdorff distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .lp import lp_solve
from .polytope import GEOM_TOL, Polytope

__all__ = [
    "HullMembership",
    "Separation",
    "distance_to_hull",
    "hausdorff_distance",
    "hull_membership",
    "min_norm_point",
]


@dataclass(frozen=True)
class Separation:
    """Strict separation ``<direction, p> < level <= <direction, s>`` for all s."""

    direction: np.ndarray
    level: float
    margin: float

    def separates(self, p, S) -> bool:
        S = np.atleast_2d(np.asarray(S, dtype=float))
        return bool(
            np.dot(self.direction, p) < self.level
            and np.all(S @ self.direction >= self.level)
        )


@dataclass(frozen=True)
class HullMembership:
    """Verdict of :func:`hull_membership` with its certificate.

    When ``inside`` is true, ``weights`` are convex weights reconstructing the
    query point (``exact_weights`` holds the rational solution when the LP
    ran in exact mode).  Otherwise ``separator`` is a strictly separating
    hyperplane.
    """

    inside: bool
    weights: Optional[np.ndarray] = None
    separator: Optional[Separation] = None
    exact_weights: Optional[tuple] = None
    exact: bool = False

    def __bool__(self) -> bool:
        return self.inside


def min_norm_point(points, max_iter: int = 500) -> tuple[np.ndarray, np.ndarray]:
    """Point of smallest Euclidean norm in the convex hull of ``points``.

    Wolfe's algorithm.  Returns the point and convex weights over the rows
    of ``points``.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    m = len(P)
    if m == 0:
        raise ValueError("empty point set")
    norms2 = np.einsum("ij,ij->i", P, P)
    scale2 = max(float(norms2.max()), 1e-300)
    z1, z2, z3 = 1e-12, 1e-10, 1e-10
    j0 = int(np.argmin(norms2))
    S = [j0]
    lam = np.array([1.0])
    x = P[j0].copy()
    for _ in range(max_iter):
        dots = P @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= z1 * scale2 or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            Q = P[S]
            n = len(S)
            K = np.zeros((n + 1, n + 1))
            K[:n, :n] = Q @ Q.T
            K[:n, n] = 1.0
            K[n, :n] = 1.0
            rhs = np.zeros(n + 1)
            rhs[n] = 1.0
            mu = np.linalg.lstsq(K, rhs, rcond=None)[0][:n]
            if np.all(mu > z2):
                lam = mu
                break
            neg = mu <= z2
            denom = lam[neg] - mu[neg]
            ok = denom > 0
            theta = float(np.min(lam[neg][ok] / denom[ok])) if ok.any() else 1.0
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (mu - lam)
            keep = lam > z3
            if not keep.any():
                keep[int(np.argmax(lam))] = True
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[S]
    weights = np.zeros(m)
    weights[S] = lam
    return x, weights


def distance_to_hull(p, points) -> float:
    """Euclidean distance from ``p`` to the convex hull of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    x, _ = min_norm_point(P - np.asarray(p, dtype=float))
    return float(np.linalg.norm(x))


def hull_membership(p, S, exact="auto") -> HullMembership:
    """Decide whether ``p`` lies in the convex hull of the finite set ``S``.

    Solves the convex-combination feasibility LP ``S^T w = p, sum(w) = 1,
    w >= 0``.  A feasible LP yields the weights; an infeasible one yields a
    Farkas vector, turned into a separating hyperplane.  The nearest-point
    direction is also tried and the separator with the larger margin kept.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    p = np.asarray(p, dtype=float).ravel()
    if S.size == 0:
        raise ValueError("hull of an empty set")
    if S.shape[1] != p.size:
        raise ValueError(f"dimension mismatch: points in R^{S.shape[1]}, query in R^{p.size}")
    m, k = S.shape
    A_eq = np.vstack([S.T, np.ones((1, m))])
    b_eq = np.r_[p, 1.0]
    res = lp_solve(np.zeros(m), A_eq=A_eq, b_eq=b_eq, exact=exact)
    if res.status == "optimal":
        w = np.asarray([float(t) for t in res.x])
        exact_w = tuple(res.x) if res.exact else None
        return HullMembership(True, weights=w, exact_weights=exact_w, exact=res.exact)

    candidates = []
    y = res.farkas
    if y is not None:
        direction = np.array([float(t) for t in y[:k]])
        if np.linalg.norm(direction) > 0:
            candidates.append(direction / np.linalg.norm(direction))
    x, _ = min_norm_point(S - p)
    if np.linalg.norm(x) > 0:
        candidates.append(x / np.linalg.norm(x))
    best = None
    for u in candidates:
        gap = float(np.min(S @ u) - p @ u)
        if best is None or gap > best[0]:
            best = (gap, u)
    gap, u = best if best is not None else (0.0, np.zeros(k))
    level = float(p @ u + 0.5 * gap)
    sep = Separation(direction=u, level=level, margin=0.5 * gap)
    return HullMembership(False, separator=sep, exact=res.exact)


def _dist_to_polytope(z: np.ndarray, P: Polytope) -> float:
    if len(P.offsets) and np.all(P.normals @ z <= P.offsets + GEOM_TOL):
        return 0.0
    return distance_to_hull(z, P.vertices)


def hausdorff_distance(P: Polytope, Q: Polytope, directed: bool = False) -> float:
    """Hausdorff distance between two vertex-represented polytopes.

    The distance to a convex set is convex, so each one-sided term is
    attained at a vertex; each vertex term is a nearest-point problem over
    the other hull.  With ``directed=True`` only ``sup_{p in P} d(p, Q)``
    is returned.
    """
    if P.is_empty or Q.is_empty:
        raise ValueError("Hausdorff distance of an empty polytope")
    if P.vertices is None or Q.vertices is None:
        raise ValueError("Hausdorff distance needs vertex-represented polytopes")
    if P.dim != Q.dim:
        raise ValueError("dimension mismatch")
    d_pq = max(_dist_to_polytope(v, Q) for v in P.vertices)
    if directed:
        return d_pq
    d_qp = max(_dist_to_polytope(v, P) for v in Q.vertices)
    return max(d_pq, d_qp)
