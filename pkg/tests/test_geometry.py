from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import ConvexHull

from idealcore.geometry import (
    Polytope,
    distance_to_hull,
    hausdorff_distance,
    hull_membership,
    min_norm_point,
)
from oracles import brute_hull_membership


def seg_dist(p, a, b):
    t = np.clip(np.dot(p - a, b - a) / np.dot(b - a, b - a), 0, 1)
    return np.linalg.norm(p - (a + t * (b - a)))


def cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def polygon_dist(p, V):
    """Distance to a convex polygon with counter-clockwise vertices V."""
    inside = all(cross2(V[(i + 1) % len(V)] - V[i], p - V[i]) >= 0 for i in range(len(V)))
    if inside:
        return 0.0
    return min(seg_dist(p, V[i], V[(i + 1) % len(V)]) for i in range(len(V)))


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(2, 3), n=st.integers(5, 40))
def test_vertices_match_qhull(seed, k, n):
    P = np.random.default_rng(seed).normal(size=(n, k))
    V = Polytope.from_points(P).vertices
    ref = P[ConvexHull(P).vertices]
    assert sorted(map(tuple, np.round(V, 12))) == sorted(map(tuple, np.round(ref, 12)))


def test_halfspaces_of_cube():
    U = np.vstack([np.eye(3), -np.eye(3)])
    P = Polytope.from_halfspaces(U, np.ones(6))
    assert len(P.vertices) == 8
    assert P.diameter() == pytest.approx(2 * np.sqrt(3))
    assert P.contains([0.5, -0.5, 0.99]) and not P.contains([1.1, 0, 0])
    assert P.support([1, 1, 0]) == pytest.approx(2.0)
    lo, hi = P.bounding_box()
    assert lo.tolist() == [-1, -1, -1] and hi.tolist() == [1, 1, 1]


def test_empty_intersection():
    P = Polytope.from_halfspaces([[1.0], [-1.0]], [0.0, -1.0])
    assert P.is_empty
    assert not P.contains([0.5])


def test_degenerate_shapes():
    seg = Polytope.from_points([[0, 0], [1, 1], [0.5, 0.5]])
    assert len(seg.vertices) == 2 and seg.diameter() == pytest.approx(np.sqrt(2))
    pt = Polytope.from_halfspaces([[1, 0], [-1, 0], [0, 1], [0, -1]], [0.3, -0.3, 0.2, -0.2])
    assert pt.vertices.round(9).tolist() == [[0.3, 0.2]]
    flat = Polytope.from_points([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    assert len(flat.vertices) == 4


def test_high_dimension_point_polytope():
    P = Polytope.from_points(np.vstack([np.eye(4), -np.eye(4)]))
    assert P.contains(np.full(4, 0.2)) and not P.contains(np.full(4, 0.3))


@given(seed=st.integers(0, 2**32 - 1))
def test_distance_matches_polygon_oracle(seed):
    g = np.random.default_rng(seed)
    P = g.normal(size=(12, 2))
    V = P[ConvexHull(P).vertices]
    p = g.normal(size=2) * 3
    assert distance_to_hull(p, P) == pytest.approx(polygon_dist(p, V), abs=1e-9)


def test_min_norm_point_weights():
    S = np.array([[1.0, 1.0], [1.0, -1.0], [3.0, 0.0]])
    x, w = min_norm_point(S)
    assert x == pytest.approx([1.0, 0.0], abs=1e-12)
    assert w.sum() == pytest.approx(1.0) and np.all(w >= 0)
    assert w @ S == pytest.approx(x)


def test_hausdorff_known_values():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    A = Polytope.from_points(sq)
    B = Polytope.from_points(sq + [0.3, 0.0])
    assert hausdorff_distance(A, B) == pytest.approx(0.3)
    C = Polytope.from_points([[0.5, 0.5]])
    assert hausdorff_distance(A, C) == pytest.approx(np.sqrt(0.5))
    assert hausdorff_distance(C, A, directed=True) == 0.0
    with pytest.raises(ValueError):
        hausdorff_distance(A, Polytope.empty(2))


@given(seed=st.integers(0, 2**32 - 1))
def test_hausdorff_against_sampled_boundary(seed):
    g = np.random.default_rng(seed)
    A = Polytope.from_points(g.normal(size=(8, 2)))
    B = Polytope.from_points(g.normal(size=(8, 2)) + g.normal(size=2))
    h = hausdorff_distance(A, B)
    # dense boundary samples of each polygon give a lower bound that converges
    def boundary(V):
        t = np.linspace(0, 1, 200, endpoint=False)[:, None]
        return np.vstack([V[i] + t * (V[(i + 1) % len(V)] - V[i]) for i in range(len(V))])

    VA = A.vertices[ConvexHull(A.vertices).vertices]
    VB = B.vertices[ConvexHull(B.vertices).vertices]
    lb = max(max(polygon_dist(p, VB) for p in boundary(VA)), max(polygon_dist(p, VA) for p in boundary(VB)))
    assert lb - 1e-9 <= h <= lb + 1e-2 * (1 + h)


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 4))
def test_membership_certificates(seed, k):
    g = np.random.default_rng(seed)
    S = g.integers(-3, 4, size=(6, k)).astype(float)
    p = g.integers(-3, 4, size=k).astype(float)
    res = hull_membership(p, S, exact=True)
    assert bool(res) == brute_hull_membership(p, S)
    if res.inside:
        assert sum(res.exact_weights) == 1
        assert all(w >= 0 for w in res.exact_weights)
        assert [sum(w * Fraction(s[i]) for w, s in zip(res.exact_weights, S.tolist())) for i in range(k)] == p.tolist()
    else:
        assert res.separator.separates(p, S)
        assert res.separator.margin > 0


def test_membership_float_mode():
    S = np.random.default_rng(0).normal(size=(200, 3))
    assert hull_membership(S.mean(axis=0), S, exact=False).inside
    assert not hull_membership(S.max(axis=0) + 1, S, exact=False).inside


def test_membership_errors():
    with pytest.raises(ValueError):
        hull_membership([0, 0], np.zeros((0, 2)))
    with pytest.raises(ValueError):
        hull_membership([0, 0, 0], np.zeros((3, 2)))
