"""Small hand-checkable instances not covered elsewhere."""

import numpy as np
import pytest

from idealcore.core import caratheodory_decompose, choquet_measure, core_membership_by_balls
from idealcore.geometry import Polytope, hausdorff_distance, support_value
from idealcore.ideal import make_fin
from idealcore.sequence import generate

TRI = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def test_centroid_uses_all_three_vertices():
    cc = caratheodory_decompose(TRI.mean(axis=0), TRI)
    assert len(cc) == 3
    assert np.sort(cc.weights) == pytest.approx([1 / 3] * 3, abs=1e-12)


def test_vertex_is_a_dirac():
    for v in TRI:
        cc = caratheodory_decompose(v, TRI)
        assert len(cc) == 1 and cc.weights[0] == pytest.approx(1.0)
        mu = choquet_measure(v, TRI)
        assert len(mu) == 1 and mu.supports[0] == pytest.approx(v)


def test_midpoint_of_two_points():
    S = np.array([[-1.0, 0.0], [1.0, 0.0]])
    mu = choquet_measure([0.0, 0.0], S)
    assert mu.weights == pytest.approx([0.5, 0.5])


def test_support_values_of_unit_square():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert support_value(sq, [1.0, 0.0]) == pytest.approx(1.0)
    assert support_value(sq, np.array([1.0, 1.0]) / np.sqrt(2)) == pytest.approx(np.sqrt(2))
    assert support_value([[0.3, -2.0]], [0.6, 0.8]) == pytest.approx(0.3 * 0.6 - 1.6)


def test_intervals_and_dilated_triangle():
    assert hausdorff_distance(Polytope.from_points([[0.0], [1.0]]), Polytope.from_points([[0.0], [2.0]])) == pytest.approx(1.0)
    c = TRI.mean(axis=0)
    big = c + 1.1 * (TRI - c)
    # farthest point of the larger triangle from the smaller one is a vertex, at 0.1 of its centroid distance
    expected = 0.1 * np.max(np.linalg.norm(TRI - c, axis=1))
    assert hausdorff_distance(Polytope.from_points(TRI), Polytope.from_points(big)) == pytest.approx(expected, rel=1e-9)


def test_ball_test_on_alt():
    x = generate("alt", 10_000)
    assert core_membership_by_balls(x, make_fin(), [0.0])
    # center y = -10 has limsup |x_n + 10| = 11 < |1.5 + 10|
    assert not core_membership_by_balls(x, make_fin(), [1.5])
