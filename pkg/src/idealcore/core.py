"""
The ideal core of a sequence in R^k, computed three independent ways.

``core_by_support``
    Intersection of halfspaces {z : <u, z> <= I-limsup <u, x_n>} over a
    fixed direction set.  This is the definitional intersection over large
    index sets, read one direction at a time.
``core_by_cluster_hull``
    Convex hull of the estimated cluster set.
``core_by_balls``
    The set of p with ‖p - y‖ <= I-limsup ‖x_n - y‖ for every sampled
    center y, traced along rays from an interior point.

Decompositions of core points into cluster points (Carathéodory weights and
discrete barycentric measures) and the convergence test live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import defaults
from .cluster import ClusterSet, estimate_clusters
from .geometry import Polytope, Separation, convex_hull_vertices, hull_membership, lp_solve, min_norm_point
from .ideal import FiniteIdealModel, IdealSpecError
from .limits import _snap, check_bounded, limsup_batch, threshold_batch
from .sequence import SequenceWindow

__all__ = [
    "BallCore",
    "ConvexCombination",
    "CoreReport",
    "NotInHullError",
    "ball_characterization",
    "caratheodory_decompose",
    "choquet_measure",
    "core_by_balls",
    "core_by_cluster_hull",
    "core_by_support",
    "core_membership_by_balls",
    "direction_set",
    "is_ideal_convergent",
]

FAR_SCALES = (1.0, 10.0, 100.0, 1000.0)
MAX_HULL_CENTERS = 64
# bisection steps along each ray of the ball construction
_RAY_STEPS = 60
# points this close to the hull (relative to its extent) count as members,
# so float round-off cannot push a point off a lower-dimensional hull
HULL_SLACK = 1e-10


class NotInHullError(ValueError):
    """The point is outside the hull of the cluster candidates."""

    def __init__(self, point, separator: Separation):
        self.point = np.asarray(point, dtype=float)
        self.separator = separator
        super().__init__(
            f"point {self.point.tolist()} lies outside the cluster hull; separated by "
            f"u = {np.round(separator.direction, 12).tolist()}, level {separator.level:.12g}"
        )


@dataclass(frozen=True)
class CoreReport:
    """Result of one core construction.

    ``status`` is ``"ok"`` or ``"empty"``; ``params`` echoes every setting
    used, ``extra`` carries construction-specific data such as the cluster
    set.
    """

    model: str
    construction: str
    result: Polytope
    params: dict
    scale: int
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def status(self) -> str:
        return "empty" if self.result.is_empty else "ok"

    @property
    def diameter(self) -> float:
        return self.result.diameter()

    def as_dict(self) -> dict:
        P = self.result
        out: dict[str, Any] = {
            "construction": self.construction,
            "model": self.model,
            "scale": self.scale,
            "status": self.status,
            "diameter": None if P.is_empty else P.diameter(),
            "params": dict(self.params),
        }
        if P.vertices is not None:
            out["vertices"] = _sorted_rows(P.vertices).tolist()
        out["halfspaces"] = [{"u": u.tolist(), "b": float(b)} for u, b in zip(P.normals, P.offsets)]
        return out


def _sorted_rows(A: np.ndarray) -> np.ndarray:
    if len(A) == 0:
        return A
    return A[np.lexsort(A.T[::-1])]


@dataclass(frozen=True)
class ConvexCombination:
    """Convex weights on support points; a discrete probability measure."""

    supports: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.supports, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if len(S) != len(w):
            raise ValueError("one weight per support point")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "supports", S)
        object.__setattr__(self, "weights", w)

    @property
    def barycenter(self) -> np.ndarray:
        return self.weights @ self.supports

    def error(self, p) -> float:
        """Euclidean distance between the barycenter and ``p``."""
        return float(np.linalg.norm(self.barycenter - np.asarray(p, dtype=float)))

    def validate(self, p, tol: float = 1e-9) -> bool:
        return self.error(p) <= tol

    def __len__(self) -> int:
        return len(self.weights)


# ---------------------------------------------------------------- directions


def direction_set(k: int, count: Optional[int] = None) -> np.ndarray:
    """Deterministic quasi-uniform unit directions in R^k.

    k = 1 gives {+1, -1}; k = 2 gives ``count`` equally spaced angles; for
    k >= 3 a Fibonacci-type lattice on the sphere is symmetrized under
    u -> -u and the coordinate axes ±e_i are added.  The default count is
    64 k.
    """
    k = int(k)
    if k < 1:
        raise ValueError("dimension must be positive")
    if k == 1:
        return np.array([[1.0], [-1.0]])
    count = defaults.DIRECTIONS_PER_DIM * k if count is None else int(count)
    if count < 2 * k:
        raise ValueError(f"need at least {2 * k} directions in R^{k}")
    if k == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    half = max(1, (count - 2 * k) // 2)
    U = _fibonacci_sphere(k, half)
    U = np.vstack([np.eye(k), -np.eye(k), U, -U])
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    return U


def _fibonacci_sphere(k: int, n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    if k == 3:
        golden = (1 + 5**0.5) / 2
        z = 1 - 2 * i / n
        r = np.sqrt(np.maximum(0.0, 1 - z * z))
        phi = 2 * np.pi * i / golden
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    # higher dimensions: Kronecker lattice pushed through the Gaussian quantile
    from scipy.special import ndtri

    alphas = np.sqrt(np.array(_primes(k), dtype=float)) % 1.0
    G = ndtri((i[:, None] * alphas[None, :]) % 1.0)
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def _primes(n: int) -> list[int]:
    out, c = [], 2
    while len(out) < n:
        if all(c % p for p in out):
            out.append(c)
        c += 1
    return out


# ---------------------------------------------------------------- helpers


def _window(x, I: FiniteIdealModel) -> SequenceWindow:
    if not isinstance(x, SequenceWindow):
        x = SequenceWindow(np.asarray(x, dtype=float))
    if x.arity != I.arity:
        raise IdealSpecError(f"{I.name} is {I.arity}-arity but the window is {x.arity}")
    return x


def _project(x: SequenceWindow, U: np.ndarray) -> np.ndarray:
    """<u, x_n> for every direction: shape (directions, *window)."""
    return np.moveaxis(x.values @ U.T, -1, 0)


# ---------------------------------------------------------------- support core


def _support_offsets(x: SequenceWindow, I: FiniteIdealModel, U: np.ndarray, delta: float):
    """Grid limsup offsets and, per direction, a term attaining the threshold."""
    proj = _project(x, U)
    axes = tuple(range(1, proj.ndim))
    w = threshold_batch(proj, I)
    b = _snap(w, proj.min(axis=axes), proj.max(axis=axes), float(delta))
    flat = proj.reshape(len(U), -1)
    witness = x.flat[np.argmax(flat == w[:, None], axis=1)]
    return b, witness


def core_by_support(
    x,
    I: FiniteIdealModel,
    directions: Optional[int] = None,
    delta: float = defaults.DELTA,
    *,
    bound: Optional[float] = defaults.BOUND,
    refine: int = defaults.SUPPORT_REFINE,
) -> CoreReport:
    """Core as an intersection of halfspaces with ideal-limsup offsets.

    Parameters
    ----------
    x : SequenceWindow
    I : FiniteIdealModel
    directions : int, optional
        Size of the base direction set (default 64 k, ignored for k = 1).
    delta : float
        Value-grid step of the scalar limsup.
    bound : float or None
        I-boundedness cutoff; None disables the check.
    refine : int
        Rounds of direction refinement for k >= 2.  Each round takes, for
        every direction, a term attaining its threshold, and adds the facet
        normals of the hull of those terms as new directions.  Every added
        halfspace is again an exact ideal-limsup halfspace, so refinement
        only removes sampling overshoot near vertices.

    Raises
    ------
    UnboundedSequenceError
    """
    x = _window(x, I)
    if bound is not None:
        check_bounded(x, I, bound)
    U = direction_set(x.dim, directions)
    b, wit = _support_offsets(x, I, U, delta)
    base = len(U)
    for _ in range(refine if x.dim >= 2 else 0):
        N = Polytope.from_points(wit).normals
        new = N[np.max(N @ U.T, axis=1) < 1 - 1e-10] if len(N) else N
        if len(new) == 0:
            break
        b_new, wit_new = _support_offsets(x, I, new, delta)
        U, b, wit = np.vstack([U, new]), np.r_[b, b_new], np.vstack([wit, wit_new])
    P = Polytope.from_halfspaces(U, b)
    params = {"directions": base, "refined_directions": len(U), "refine": int(refine), "delta": float(delta), "bound": bound}
    return CoreReport(I.name, "support", P, params, x.scale, {"normals": U, "offsets": b})


# ---------------------------------------------------------------- cluster hull


def core_by_cluster_hull(
    x,
    I: FiniteIdealModel,
    eps_final: float = defaults.EPS_FINAL,
    rounds: int = defaults.MAX_ROUNDS,
    *,
    box=None,
    bound: Optional[float] = defaults.BOUND,
    clusters: Optional[ClusterSet] = None,
) -> CoreReport:
    """Core as the convex hull of the estimated cluster set.

    An empty cluster set gives an empty polytope (status ``"empty"``).
    A precomputed ``clusters`` skips the estimation.
    """
    x = _window(x, I)
    if clusters is None:
        clusters = estimate_clusters(x, I, eps_final, rounds, box=box, bound=bound)
    P = Polytope.from_points(clusters.points, dim=x.dim)
    params = {"eps_final": float(eps_final), "rounds": int(rounds), "radius": clusters.radius, "bound": bound}
    if box is not None:
        params["box"] = [np.broadcast_to(np.asarray(b, dtype=float), (x.dim,)).tolist() for b in box]
    return CoreReport(I.name, "cluster_hull", P, params, x.scale, {"clusters": clusters})


# ---------------------------------------------------------------- balls


@dataclass(frozen=True)
class BallCore:
    """Finite ball characterization: p is in iff ‖p - y‖ <= m(y) + delta for all centers y."""

    centers: np.ndarray
    radii: np.ndarray
    delta: float
    # terms attaining the far-center radii; they sit near extreme points of the core
    anchors: Optional[np.ndarray] = field(default=None, repr=False)

    def contains(self, points, slack: float = 0.0) -> np.ndarray | bool:
        """Ball test for one point or an array of points, with extra ``slack``."""
        Z = np.asarray(points, dtype=float)
        single = Z.ndim == 1
        Z = np.atleast_2d(Z)
        lim = self.radii + self.delta + slack
        # squared distances through the Gram expansion; one matrix product
        d2 = np.sum(Z * Z, axis=1)[:, None] - 2.0 * Z @ self.centers.T + np.sum(self.centers**2, axis=1)[None, :]
        out = np.all(d2 <= lim[None, :] ** 2, axis=1)
        return bool(out[0]) if single else out

    def witness(self, p) -> Optional[np.ndarray]:
        """A center whose ball excludes ``p``, or None."""
        d = np.linalg.norm(self.centers - np.asarray(p, dtype=float), axis=1)
        gap = d - self.radii - self.delta
        j = int(np.argmax(gap))
        return self.centers[j] if gap[j] > 0 else None


def _center_base(x: SequenceWindow, bound: Optional[float]):
    pts = x.flat
    if bound is not None:
        inside = pts[np.linalg.norm(pts, axis=1) <= bound]
        pts = inside if len(inside) else pts
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return pts, 0.5 * (lo + hi), max(float(np.linalg.norm(hi - lo)), 1.0)


def _far_centers(c0: np.ndarray, D: float, U: np.ndarray) -> np.ndarray:
    return np.vstack([c0 + s * D * U for s in FAR_SCALES])


def _ball_radii(x: SequenceWindow, I: FiniteIdealModel, Y: np.ndarray, delta: float):
    """m(y) on the grid for every center, plus a term attaining each threshold."""
    lead = (1,) * (x.values.ndim - 1)
    per = max(1, (1 << 21) // len(x))
    radii, wit = [], []
    for s in range(0, len(Y), per):
        d = np.linalg.norm(x.values[None, ...] - Y[s : s + per].reshape((-1,) + lead + (x.dim,)), axis=-1)
        axes = tuple(range(1, d.ndim))
        w = threshold_batch(d, I)
        radii.append(_snap(w, d.min(axis=axes), d.max(axis=axes), float(delta)))
        wit.append(x.flat[np.argmax(d.reshape(len(d), -1) == w[:, None], axis=1)])
    return np.concatenate(radii), np.vstack(wit)


def ball_characterization(
    x,
    I: FiniteIdealModel,
    centers: int = defaults.BALL_CENTERS,
    delta: float = defaults.DELTA,
    *,
    bound: Optional[float] = defaults.BOUND,
    directions: Optional[int] = None,
    refine: int = defaults.SUPPORT_REFINE,
) -> BallCore:
    """Sample centers and their radii m(y) = I-limsup ‖x_n - y‖.

    Centers are ``centers`` evenly spaced window terms, up to 64 vertices of
    the data hull (k <= 3) and far points c0 + R u for R in {1, 10, 100,
    1000} times the data diameter along the direction set.  A ball around a
    far center acts like a halfspace with normal -u.  As in
    :func:`core_by_support`, ``refine`` rounds add far centers opposite the
    facet normals of the hull of the terms attaining each far radius.
    """
    x = _window(x, I)
    if bound is not None:
        check_bounded(x, I, bound)
    pts, c0, D = _center_base(x, bound)
    k = x.dim
    idx = np.unique(np.linspace(0, len(pts) - 1, max(1, int(centers))).round().astype(int))
    near = [pts[idx]]
    if k <= 3:
        V = convex_hull_vertices(pts)
        if len(V) > MAX_HULL_CENTERS:
            V = V[np.linspace(0, len(V) - 1, MAX_HULL_CENTERS).round().astype(int)]
        near.append(V)
    U = direction_set(k, directions)
    Y = np.vstack(near + [_far_centers(c0, D, U)])
    m, wit = _ball_radii(x, I, Y, delta)
    n_near = sum(len(a) for a in near)
    for _ in range(refine if k >= 2 else 0):
        N = Polytope.from_points(wit[n_near:]).normals
        new = N[np.max(N @ -U.T, axis=1) < 1 - 1e-10] if len(N) else N
        if len(new) == 0:
            break
        Y_new = _far_centers(c0, D, -new)
        m_new, wit_new = _ball_radii(x, I, Y_new, delta)
        U = np.vstack([U, -new])
        Y, m, wit = np.vstack([Y, Y_new]), np.r_[m, m_new], np.vstack([wit, wit_new])
    return BallCore(Y, m, float(delta), np.unique(wit[n_near:], axis=0))


def core_membership_by_balls(
    x,
    I: FiniteIdealModel,
    p,
    centers: int = defaults.BALL_CENTERS,
    delta: float = defaults.DELTA,
    *,
    bound: Optional[float] = defaults.BOUND,
) -> bool:
    """Ball test for a single point; a False verdict is always sound."""
    return bool(ball_characterization(x, I, centers, delta, bound=bound).contains(np.asarray(p, dtype=float).ravel()))


def core_by_balls(
    x,
    I: FiniteIdealModel,
    centers: int = defaults.BALL_CENTERS,
    delta: float = defaults.DELTA,
    directions: Optional[int] = None,
    *,
    bound: Optional[float] = defaults.BOUND,
    balls: Optional[BallCore] = None,
) -> CoreReport:
    """Polytope traced from the ball characterization.

    From an interior point (mean of the sampled window terms that pass the
    ball test) the boundary of the ball region is located by bisection
    along every ray of the direction set; the report holds the hull of those
    boundary points.  Tracing uses the estimated radii m(y) themselves; the
    extra ``delta`` of :meth:`BallCore.contains` is a tolerance for single
    membership verdicts and would widen the traced set by about delta.
    """
    x = _window(x, I)
    if balls is None:
        balls = ball_characterization(x, I, centers, delta, bound=bound, directions=directions)
    k = x.dim
    params = {"centers": int(len(balls.centers)), "delta": float(delta), "bound": bound}
    pts = x.flat
    if bound is not None:
        inner = pts[np.linalg.norm(pts, axis=1) <= bound]
        pts = inner if len(inner) else pts
    idx = np.unique(np.linspace(0, len(pts) - 1, 512).round().astype(int))
    cand = np.vstack([pts[idx], pts[idx].mean(axis=0, keepdims=True)])

    def inside_m(z):
        return balls.contains(z, slack=-balls.delta)

    ok = inside_m(cand)
    if not ok.any():
        return CoreReport(I.name, "ball", Polytope.empty(k), params, x.scale, {"balls": balls})
    z0 = cand[ok].mean(axis=0)
    if not inside_m(z0):
        z0 = cand[ok][0]
    U = direction_set(k, directions)
    if balls.anchors is not None and len(balls.anchors):
        # rays toward the anchors reach sharp vertices the fixed directions miss
        R = balls.anchors - z0
        nr = np.linalg.norm(R, axis=1)
        U = np.vstack([U, R[nr > 1e-12] / nr[nr > 1e-12, None]])
    span = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))) + 2 * delta + 1.0
    lo = np.zeros(len(U))
    hi = np.full(len(U), 2 * span)
    for _ in range(_RAY_STEPS):
        mid = 0.5 * (lo + hi)
        inside = inside_m(z0 + mid[:, None] * U)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    B = z0 + lo[:, None] * U
    params["directions"] = len(U)
    return CoreReport(I.name, "ball", Polytope.from_points(B), params, x.scale, {"balls": balls, "interior": z0})


# ---------------------------------------------------------------- decompositions


def _candidate_points(C) -> np.ndarray:
    S = C.points if isinstance(C, ClusterSet) else np.asarray(C, dtype=float)
    S = np.atleast_2d(S)
    if S.size == 0:
        raise ValueError("empty cluster set")
    S = np.unique(S, axis=0)
    if S.shape[1] <= 3 and len(S) > S.shape[1] + 1:
        # the hull vertices are themselves candidates and span the same hull
        S = convex_hull_vertices(S)
    return S


def _membership(p, S) -> np.ndarray:
    res = hull_membership(p, S)
    if res.inside:
        return res.weights
    x, w = min_norm_point(S - p)
    scale = max(1.0, float(np.max(np.abs(S))))
    if np.linalg.norm(x) <= HULL_SLACK * scale:
        return w
    raise NotInHullError(p, res.separator)


def _reduce_support(S: np.ndarray, w: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Drop points while the support is affinely dependent (Carathéodory step)."""
    keep = w > tol
    S, w = S[keep], w[keep]
    while len(w) > 1:
        A = np.vstack([S.T, np.ones(len(w))])
        _, sv, Vt = np.linalg.svd(A)
        rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
        if rank >= len(w):
            break
        alpha = Vt[-1]
        if not np.any(alpha > 0):
            alpha = -alpha
        pos = alpha > 1e-15
        t = np.min(w[pos] / alpha[pos])
        w = w - t * alpha
        w[np.argmin(np.where(pos, w, np.inf))] = 0.0
        keep = w > tol
        S, w = S[keep], w[keep]
    return S, w


def _refine(S: np.ndarray, w: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Least-squares polish of the weights on a fixed support."""
    A = np.vstack([S.T, np.ones(len(w))])
    rhs = np.r_[p, 1.0]
    w2 = np.linalg.lstsq(A, rhs, rcond=None)[0]
    if np.all(w2 >= 0) and np.linalg.norm(A @ w2 - rhs) <= np.linalg.norm(A @ w - rhs):
        w = w2
    w = np.clip(w, 0.0, None)
    return w / math.fsum(w)


def caratheodory_decompose(p, C) -> ConvexCombination:
    """Write ``p`` as a convex combination of at most k + 1 cluster candidates.

    Parameters
    ----------
    p : array_like, shape (k,)
    C : ClusterSet or array of points

    Raises
    ------
    NotInHullError
        If ``p`` is outside the hull; carries the separating halfspace.
    """
    p = np.asarray(p, dtype=float).ravel()
    S = _candidate_points(C)
    if S.shape[1] != p.size:
        raise ValueError("dimension mismatch")
    w = _membership(p, S)
    T, w = _reduce_support(S, w)
    return ConvexCombination(T, _refine(T, w, p))


def choquet_measure(p, C, draws: int = 4, seed: int = 0) -> ConvexCombination:
    """Discrete probability measure on cluster candidates with barycenter ``p``.

    The average of the LP solutions for ``draws`` seeded random objectives;
    the support is not capped at k + 1 points.
    """
    p = np.asarray(p, dtype=float).ravel()
    S = np.atleast_2d(C.points if isinstance(C, ClusterSet) else np.asarray(C, dtype=float))
    S = np.unique(S, axis=0)
    if S.shape[1] != p.size:
        raise ValueError("dimension mismatch")
    _membership(p, _candidate_points(S))
    rng = np.random.default_rng(seed)
    A_eq = np.vstack([S.T, np.ones((1, len(S)))])
    b_eq = np.r_[p, 1.0]
    total = np.zeros(len(S))
    for _ in range(max(1, int(draws))):
        c = rng.standard_normal(len(S))
        res = lp_solve(c, A_eq=A_eq, b_eq=b_eq, exact="auto")
        if res.status == "infeasible" and res.exact:
            # p passed the membership test within HULL_SLACK; float pivoting absorbs that round-off
            res = lp_solve(c, A_eq=A_eq, b_eq=b_eq, exact=False)
        if res.status != "optimal":
            raise RuntimeError(f"barycentric LP ended with status {res.status}")
        total += np.array([float(t) for t in res.x])
    w = total / max(1, int(draws))
    keep = w > 1e-15
    S, w = S[keep], w[keep]
    return ConvexCombination(S, _refine(S, w, p))


# ---------------------------------------------------------------- convergence


def is_ideal_convergent(
    x,
    I: FiniteIdealModel,
    tol: float = defaults.DELTA,
    delta: float = defaults.DELTA,
    directions: Optional[int] = None,
    *,
    bound: Optional[float] = defaults.BOUND,
) -> Optional[np.ndarray]:
    """The I-limit when the support core has diameter at most ``tol``.

    The limit reported is the midpoint of the core's bounding box.
    """
    rep = core_by_support(x, I, directions, delta, bound=bound)
    P = rep.result
    if P.is_empty or P.diameter() > tol:
        return None
    return P.center()
