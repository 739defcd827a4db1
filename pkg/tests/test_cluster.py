import numpy as np
import pytest
from hypothesis import given, strategies as st

from idealcore.cluster import estimate_clusters, grid_cells, is_cluster_point, surviving_cells
from idealcore.ideal import make_density_zero, make_fin, make_pringsheim
from idealcore.limits import UnboundedSequenceError
from idealcore.sequence import SequenceWindow, generate


def full_grid(x, I, lo, hi, eps0, levels):
    """Every cell of the finest lattice, tested one by one."""
    centers, eps = grid_cells(lo, hi, eps0, levels)
    keep = [c for c in centers if not I.smallness(np.all(np.abs(x.values - c) <= eps * (1 + 1e-9), axis=-1))]
    return np.array(keep).reshape(-1, x.dim), eps


def as_set(A):
    return set(map(tuple, np.round(A, 9)))


@pytest.mark.parametrize(
    "spec,I",
    [
        ("alt_decay", make_fin()),
        ("sparse_spike(squares)", make_density_zero()),
        ("cycle([(0,0),(1,0),(0,1)], noise=0.2, seed=3)", make_fin()),
        ("uniform(dim=2, seed=4)", make_density_zero(0.02)),
    ],
)
def test_nested_refinement_equals_full_grid(spec, I):
    x = generate(spec, 2000)
    lo, hi = x.flat.min(axis=0), x.flat.max(axis=0)
    D = float(np.max(hi - lo))
    C = estimate_clusters(x, I, eps_final=D / 8 / 2**4)
    ref, eps = full_grid(x, I, lo, hi, D / 8, C.rounds)
    assert C.radius == pytest.approx(eps)
    assert as_set(C.points) == as_set(ref)


def test_alternating_clusters():
    C = estimate_clusters(generate("alt", 10_000), make_fin())
    assert C.radius <= 1e-2
    assert np.all(np.min(np.abs(np.abs(C.points) - 1), axis=1) <= C.radius)
    assert C.points.min() < 0 < C.points.max()


def test_spike_clusters_depend_on_the_ideal():
    x = generate("sparse_spike(squares)", 10_000)
    fin = estimate_clusters(x, make_fin()).points[:, 0]
    z = estimate_clusters(x, make_density_zero()).points[:, 0]
    assert np.any(np.abs(fin - 1) < 0.02) and np.any(np.abs(fin) < 0.02)
    assert np.all(np.abs(z) < 0.02)


def test_is_cluster_point():
    x = generate("alt_decay", 10_000)
    assert is_cluster_point(x, make_fin(), [1.0], 0.01)
    assert is_cluster_point(x, make_fin(), [-1.0], 0.01)
    assert not is_cluster_point(x, make_fin(), [0.0], 0.5)


def test_double_window():
    x = generate("double_alt", 64)
    C = estimate_clusters(x, make_pringsheim())
    assert sorted(set(np.sign(C.points[:, 0]).tolist())) == [-1.0, 1.0]


def test_unbounded_and_empty():
    x = generate("alt_linear", 1000)
    with pytest.raises(UnboundedSequenceError):
        estimate_clusters(x, make_density_zero())
    C = estimate_clusters(x, make_density_zero(), bound=None, box=([-100.0], [100.0]))
    assert C.is_empty


@given(seed=st.integers(0, 2**32 - 1))
def test_survivors_are_monotone_in_cell_size(seed):
    g = np.random.default_rng(seed)
    x = SequenceWindow(g.normal(size=(500, 2)))
    c = g.normal(size=(30, 2))
    small = surviving_cells(x, make_density_zero(), c, 0.1)
    big = surviving_cells(x, make_density_zero(), c, 0.2)
    assert np.all(big[small])


def test_bad_eps():
    with pytest.raises(ValueError):
        estimate_clusters(generate("alt", 100), make_fin(), eps_final=0)
