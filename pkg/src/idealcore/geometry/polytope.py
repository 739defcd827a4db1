"""
Convex polytopes in R^k.

A :class:`Polytope` keeps a vertex list and a list of supporting
halfspaces ``<u, z> <= b``.  Vertex enumeration is done for k <= 3 only;
in higher dimension a polytope built from points keeps the raw point list
(support function evaluated lazily) and one built from halfspaces keeps
just the halfspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from .lp import lp_solve

__all__ = [
    "Halfspace",
    "Polytope",
    "affine_frame",
    "convex_hull_vertices",
    "support_value",
    "MAX_VERTEX_DIM",
]

MAX_VERTEX_DIM = 3
GEOM_TOL = 1e-9


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace ``{z : <u, z> <= b}`` with ``u`` a unit vector."""

    u: np.ndarray
    b: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).ravel()
        norm = np.linalg.norm(u)
        if norm == 0:
            raise ValueError("halfspace normal must be nonzero")
        if abs(norm - 1.0) > 1e-12:
            object.__setattr__(self, "b", float(self.b) / norm)
            u = u / norm
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "b", float(self.b))

    def contains(self, z, tol: float = 0.0) -> bool:
        return bool(np.dot(self.u, z) <= self.b + tol)


def support_value(points, u) -> float:
    """Largest value of ``<u, s>`` over the finite set ``points``.

    >>> support_value([[0, 0], [1, 0], [0, 1], [1, 1]], [1, 0])
    1.0
    """
    S = np.atleast_2d(np.asarray(points, dtype=float))
    if S.size == 0:
        raise ValueError("support value of an empty set")
    return float(np.max(S @ np.asarray(u, dtype=float)))


def affine_frame(points, tol: float = GEOM_TOL):
    """Origin, orthonormal basis and complement of the affine hull of ``points``.

    Returns ``(origin, basis, normals)`` with ``basis`` of shape (k, d) and
    ``normals`` of shape (k, k - d), where d is the affine dimension.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    k = P.shape[1]
    origin = P.mean(axis=0)
    centered = P - origin
    if len(P) == 1:
        return origin, np.zeros((k, 0)), np.eye(k)
    # the full U factor is only affordable (and only needed) for tiny point sets
    _, s, vt = np.linalg.svd(centered, full_matrices=len(P) < k)
    scale = max(1.0, float(np.abs(P).max()))
    d = int(np.sum(s > tol * scale * max(1.0, np.sqrt(len(P)))))
    return origin, vt[:d].T, vt[d:].T


def _monotone_chain(pts: np.ndarray) -> np.ndarray:
    """Indices of the 2-D convex hull in counter-clockwise order."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(pts[lower[-2]], pts[lower[-1]], pts[i]) <= 0:
            lower.pop()
        lower.append(int(i))
    upper: list[int] = []
    for i in order[::-1]:
        while len(upper) >= 2 and cross(pts[upper[-2]], pts[upper[-1]], pts[i]) <= 0:
            upper.pop()
        upper.append(int(i))
    return np.array(lower[:-1] + upper[:-1], dtype=int)


def _reduced_hull(points: np.ndarray):
    """Hull vertex indices and facet normals/offsets in the affine frame."""
    origin, basis, normals = affine_frame(points)
    d = basis.shape[1]
    w = (points - origin) @ basis
    if d == 0:
        return np.array([0]), np.zeros((0, 0)), origin, basis, normals
    if d == 1:
        idx = np.unique([int(np.argmin(w[:, 0])), int(np.argmax(w[:, 0]))])
        facet_normals = np.array([[1.0], [-1.0]])
        return idx, facet_normals, origin, basis, normals
    if d == 2:
        idx = _monotone_chain(w)
        ring = w[idx]
        edges = np.roll(ring, -1, axis=0) - ring
        nrm = np.column_stack([edges[:, 1], -edges[:, 0]])
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        return idx, nrm, origin, basis, normals
    if d == 3:
        hull = ConvexHull(w)
        nrm = hull.equations[:, :3]
        return np.asarray(hull.vertices, dtype=int), nrm, origin, basis, normals
    raise ValueError("vertex enumeration is only supported up to dimension 3")


def convex_hull_vertices(points) -> np.ndarray:
    """Extreme points of a finite set in R^k, k <= 3 (any affine dimension)."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        return P.reshape(0, P.shape[-1] if P.ndim == 2 else 0)
    P = np.unique(P, axis=0)
    idx, *_ = _reduced_hull(P)
    return P[np.sort(idx)]


def _unique_rows(U: np.ndarray, b: np.ndarray, decimals: int = 9):
    key = np.round(np.column_stack([U, b]), decimals)
    _, first = np.unique(key, axis=0, return_index=True)
    first = np.sort(first)
    return U[first], b[first]


def _facets_from_points(P: np.ndarray):
    idx, fn, origin, basis, normals = _reduced_hull(P)
    rows = []
    if fn.size:
        rows.append(fn @ basis.T)
    if normals.shape[1]:
        rows.append(normals.T)
        rows.append(-normals.T)
    if not rows:
        return np.zeros((0, P.shape[1])), np.zeros(0)
    U = np.vstack(rows)
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    b = np.max(P @ U.T, axis=0)
    return _unique_rows(U, b)


def _interval_from_halfspaces(U: np.ndarray, b: np.ndarray, tol: float):
    u = U[:, 0]
    up = u > 0
    dn = u < 0
    if not up.any() or not dn.any():
        raise ValueError("halfspaces do not bound the polytope")
    hi = float(np.min(b[up] / u[up]))
    lo = float(np.max(b[dn] / u[dn]))
    if lo > hi + tol:
        return np.zeros((0, 1))
    if lo >= hi:
        return np.array([[0.5 * (lo + hi)]])
    return np.array([[lo], [hi]])


def _brute_force_vertices(U, b, tol):
    k = U.shape[1]
    found = []
    for rows in combinations(range(len(U)), k):
        M = U[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        z = np.linalg.solve(M, b[list(rows)])
        if np.all(U @ z <= b + tol):
            found.append(z)
    if not found:
        return np.zeros((0, k))
    return convex_hull_vertices(np.array(found))


def _halfspace_vertices(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = U.shape[1]
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    flat_tol = 1e-9 * scale
    if k == 1:
        return _interval_from_halfspaces(U, b, flat_tol)

    # flat directions: a direction whose two opposite offsets pinch to a slab
    G = U @ U.T
    best = None
    for i in range(len(U)):
        anti = np.flatnonzero(G[i] < -1 + 1e-12)
        if anti.size == 0:
            continue
        par = np.flatnonzero(G[i] > 1 - 1e-12)
        hi = float(np.min(b[par]))
        lo = float(-np.min(b[anti]))
        width = hi - lo
        if width <= flat_tol and (best is None or width < best[0]):
            best = (width, i, hi, lo)
    if best is not None:
        width, i, hi, lo = best
        if width < -flat_tol:
            return np.zeros((0, k))
        u = U[i]
        level = 0.5 * (hi + lo)
        origin = level * u
        _, _, vt = np.linalg.svd(u[None, :])
        basis = vt[1:].T
        A = U @ basis
        rhs = b - U @ origin
        norms = np.linalg.norm(A, axis=1)
        keep = norms > 1e-12
        # rows parallel to u were already accounted for by the flat slab
        sub = _halfspace_vertices(A[keep] / norms[keep, None], rhs[keep] / norms[keep])
        if len(sub) == 0:
            return np.zeros((0, k))
        return origin + sub @ basis.T

    # Chebyshev center through HiGHS; certificates are not needed here
    res = linprog(
        np.r_[np.zeros(k), -1.0],
        A_ub=np.column_stack([U, np.linalg.norm(U, axis=1)]),
        b_ub=b,
        bounds=[(None, None)] * k + [(None, None)],
        method="highs",
    )
    if res.status == 2:
        return np.zeros((0, k))
    if res.status != 0:
        raise ValueError("halfspaces do not bound the polytope")
    if res.x[k] < -flat_tol:
        return np.zeros((0, k))
    center, radius = res.x[:k], res.x[k]
    if radius > 1e-7 * scale:
        try:
            hs = HalfspaceIntersection(np.column_stack([U, -b]), center)
            return convex_hull_vertices(hs.intersections)
        except QhullError:
            pass
    return _brute_force_vertices(U, b, 1e-9 * scale)


@dataclass(frozen=True)
class Polytope:
    """Convex polytope given by vertices and supporting halfspaces.

    Attributes
    ----------
    dim : int
        Ambient dimension k.
    vertices : ndarray, shape (m, k) or None
        Extreme points (k <= 3) or a generating point list (k > 3).  ``None``
        for a halfspace-only polytope in high dimension.
    normals, offsets : ndarray
        Supporting halfspaces ``normals @ z <= offsets``; may be empty for a
        point-generated polytope with k > 3.
    """

    dim: int
    vertices: Optional[np.ndarray]
    normals: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)

    @classmethod
    def empty(cls, dim: int) -> "Polytope":
        return cls(dim, np.zeros((0, dim)), np.zeros((0, dim)), np.zeros(0))

    @classmethod
    def from_points(cls, points, dim: Optional[int] = None) -> "Polytope":
        P = np.asarray(points, dtype=float)
        if P.size == 0:
            if dim is None:
                raise ValueError("dimension required for an empty point list")
            return cls.empty(dim)
        P = np.atleast_2d(P)
        if P.ndim == 2 and dim is not None and P.shape[1] != dim:
            raise ValueError("point dimension mismatch")
        k = P.shape[1]
        P = np.unique(P, axis=0)
        if k > MAX_VERTEX_DIM:
            return cls(k, P, np.zeros((0, k)), np.zeros(0))
        V = convex_hull_vertices(P)
        U, b = _facets_from_points(P)
        return cls(k, V, U, b)

    @classmethod
    def from_halfspaces(cls, normals, offsets) -> "Polytope":
        U = np.atleast_2d(np.asarray(normals, dtype=float))
        b = np.asarray(offsets, dtype=float).ravel()
        norms = np.linalg.norm(U, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero halfspace normal")
        U = U / norms[:, None]
        b = b / norms
        k = U.shape[1]
        if k > MAX_VERTEX_DIM:
            return cls(k, None, U, b)
        V = _halfspace_vertices(U, b)
        if len(V) == 0:
            return cls.empty(k)
        # tighten to supporting offsets; the set itself is unchanged
        b_tight = np.max(V @ U.T, axis=0)
        U2, b2 = _unique_rows(U, b_tight)
        return cls(k, V, U2, b2)

    @property
    def is_empty(self) -> bool:
        return self.vertices is not None and len(self.vertices) == 0

    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(u, b) for u, b in zip(self.normals, self.offsets)]

    def support(self, u) -> float:
        """Support function ``max <u, z>`` over the polytope."""
        u = np.asarray(u, dtype=float)
        if self.is_empty:
            return -np.inf
        if self.vertices is not None:
            return support_value(self.vertices, u)
        res = lp_solve(u, A_ub=self.normals, b_ub=self.offsets, free=True, maximize=True, exact=False)
        if res.status != "optimal":
            raise ValueError(f"support LP ended with status {res.status}")
        return float(res.value)

    def contains(self, points, tol: float = 0.0) -> np.ndarray | bool:
        """Membership of one point or an array of points, within ``tol``."""
        Z = np.asarray(points, dtype=float)
        single = Z.ndim == 1
        Z = np.atleast_2d(Z)
        if self.is_empty:
            out = np.zeros(len(Z), dtype=bool)
        elif len(self.offsets):
            out = np.all(Z @ self.normals.T <= self.offsets + tol + GEOM_TOL, axis=1)
        else:
            from .hull import distance_to_hull

            out = np.array([distance_to_hull(z, self.vertices) <= tol + GEOM_TOL for z in Z])
        return bool(out[0]) if single else out

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.is_empty:
            raise ValueError("empty polytope has no bounding box")
        if self.vertices is not None:
            return self.vertices.min(axis=0), self.vertices.max(axis=0)
        eye = np.eye(self.dim)
        hi = np.array([self.support(e) for e in eye])
        lo = np.array([-self.support(-e) for e in eye])
        return lo, hi

    def diameter(self) -> float:
        """Largest distance between two points; 0 for a singleton, nan if empty."""
        if self.is_empty:
            return float("nan")
        if self.vertices is not None:
            V = self.vertices
            if len(V) == 1:
                return 0.0
            d2 = np.sum((V[:, None, :] - V[None, :, :]) ** 2, axis=-1)
            return float(np.sqrt(d2.max()))
        # halfspace-only: largest width over the stored normals
        widths = [self.support(u) + self.support(-u) for u in self.normals]
        return float(max(widths))

    def center(self) -> np.ndarray:
        """Midpoint of the bounding box."""
        lo, hi = self.bounding_box()
        return 0.5 * (lo + hi)
