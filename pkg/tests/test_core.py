import numpy as np
import pytest
from hypothesis import given, strategies as st

from idealcore.core import (
    ConvexCombination,
    NotInHullError,
    ball_characterization,
    caratheodory_decompose,
    choquet_measure,
    core_by_balls,
    core_by_cluster_hull,
    core_by_support,
    core_membership_by_balls,
    direction_set,
    is_ideal_convergent,
)
from idealcore.geometry import Polytope, hausdorff_distance
from idealcore.ideal import make_density_zero, make_fin
from idealcore.limits import UnboundedSequenceError
from idealcore.sequence import SequenceWindow, generate
from oracles import tail_interval


@pytest.mark.parametrize("k,count", [(1, None), (2, 16), (2, None), (3, None), (4, 40)])
def test_direction_set(k, count):
    U = direction_set(k, count)
    assert np.allclose(np.linalg.norm(U, axis=1), 1.0)
    # symmetric under u -> -u, so opposite supports are both present
    assert {tuple(np.round(u, 9)) for u in U} == {tuple(np.round(-u, 9)) for u in U}
    assert np.array_equal(U, direction_set(k, count))


def test_knopp_interval_of_alt():
    rep = core_by_support(generate("alt_decay", 10_000), make_fin())
    lo, hi = rep.result.bounding_box()
    tlo, thi = tail_interval(generate("alt_decay", 10_000).values[:, 0])
    assert lo[0] == pytest.approx(tlo, abs=1e-2) and hi[0] == pytest.approx(thi, abs=1e-2)
    d = rep.as_dict()
    assert d["status"] == "ok" and d["params"]["delta"] == 0.01


def test_triangle_core():
    x = generate("cycle([(0,0),(1,0),(0,1)])", 3000)
    rep = core_by_support(x, make_fin())
    ref = core_by_cluster_hull(x, make_fin())
    assert hausdorff_distance(rep.result, ref.result) <= 0.03
    assert rep.result.contains([0.2, 0.2]) and not rep.result.contains([0.6, 0.6], tol=0.01)


def test_constant_core_is_a_point():
    rep = core_by_support(generate("constant((0.25, -1.0))", 1000), make_fin())
    assert rep.diameter <= 1e-9
    assert rep.result.center() == pytest.approx([0.25, -1.0])


def test_empty_cluster_hull():
    x = generate("alt_linear", 1000)
    rep = core_by_cluster_hull(x, make_density_zero(), bound=None, box=([-100.0], [100.0]))
    assert rep.status == "empty" and rep.as_dict()["diameter"] is None


def test_unbounded_raises():
    with pytest.raises(UnboundedSequenceError):
        core_by_support(generate("alt_linear", 1000), make_density_zero())


def test_balls_disc():
    x = generate("rotation", 4000)
    B = ball_characterization(x, make_fin())
    assert B.contains([0.0, 0.0]) and B.contains([0.7, 0.7])
    assert not B.contains([1.1, 0.0])
    assert B.witness([1.1, 0.0]) is not None and B.witness([0.0, 0.0]) is None
    rep = core_by_balls(x, make_fin(), balls=B)
    assert rep.diameter == pytest.approx(2.0, abs=0.05)
    assert core_membership_by_balls(x, make_fin(), [0.5, 0.0])


def test_convex_combination_validation():
    with pytest.raises(ValueError):
        ConvexCombination([[0.0], [1.0]], [0.5, 0.6])
    with pytest.raises(ValueError):
        ConvexCombination([[0.0], [1.0]], [1.5, -0.5])
    c = ConvexCombination([[0.0], [1.0]], [0.25, 0.75])
    assert c.validate([0.75]) and not c.validate([0.7])


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 4), n=st.integers(2, 25))
def test_caratheodory_random(seed, k, n):
    g = np.random.default_rng(seed)
    S = g.normal(size=(n, k))
    lam = g.dirichlet(np.ones(n))
    p = lam @ S
    cc = caratheodory_decompose(p, S)
    assert len(cc) <= k + 1
    assert cc.error(p) <= 1e-9
    # supports are input points
    assert all(np.any(np.all(np.isclose(s, S, atol=0, rtol=0), axis=1)) for s in cc.supports)


def test_caratheodory_outside_carries_separator():
    S = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(NotInHullError) as err:
        caratheodory_decompose([1.0, 1.0], S)
    assert err.value.separator.separates(np.array([1.0, 1.0]), S)


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 3))
def test_choquet_measure(seed, k):
    g = np.random.default_rng(seed)
    S = g.normal(size=(12, k))
    p = g.dirichlet(np.ones(12)) @ S
    mu = choquet_measure(p, S, draws=3, seed=seed % 1000)
    assert mu.error(p) <= 1e-9
    assert mu.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_is_ideal_convergent():
    spike = generate("sparse_spike(squares)", 10_000)
    assert is_ideal_convergent(spike, make_density_zero()) == pytest.approx([0.0], abs=1e-2)
    assert is_ideal_convergent(spike, make_fin()) is None
    assert is_ideal_convergent(generate("alt", 1000), make_fin()) is None
    c = is_ideal_convergent(generate("constant((1.5, 2.5))", 1000), make_density_zero())
    assert c == pytest.approx([1.5, 2.5])


def test_support_handles_raw_arrays():
    g = np.random.default_rng(1)
    v = g.uniform(-1, 1, size=(3000, 2))
    rep = core_by_support(SequenceWindow(v), make_fin())
    # the Fin core at finite scale is the hull of the tail half
    tail = Polytope.from_points(v[1500:])
    assert hausdorff_distance(rep.result, tail) <= 0.03
