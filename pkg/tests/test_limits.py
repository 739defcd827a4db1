import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from idealcore.ideal import make_density_zero, make_double_density, make_fin, make_pringsheim
from idealcore.limits import (
    UnboundedSequenceError,
    ideal_liminf,
    ideal_limsup,
    is_scalar_ideal_convergent,
    scalar_limits,
    threshold_batch,
)
from idealcore.sequence import generate


def scan_oracle(v, I, delta):
    """Descending scan over lo, lo + delta, ..., closed by hi."""
    lo, hi = v.min(), v.max()
    grid = [lo + j * delta for j in range(int(math.floor((hi - lo) / delta)) + 1)]
    grid = sorted(set(g for g in grid if g < hi) | {hi}, reverse=True)
    for g in grid:
        if not I.smallness(v > g - delta):
            return g
    raise AssertionError("scan found no grid value")


def threshold_oracle(v, I):
    for t in np.sort(np.unique(v.ravel())):
        if I.smallness(v > t):
            return t


def continuous(seed, shape, kind):
    # seeded continuous draws: data never sit on grid values by accident
    g = np.random.default_rng(seed)
    if kind == "normal":
        return g.normal(size=shape)
    if kind == "mixture":
        return np.where(g.random(shape) < 0.2, g.normal(3, 0.5, shape), g.uniform(-1, 1, shape))
    return g.standard_cauchy(shape).clip(-20, 20)


KINDS = st.sampled_from(["normal", "mixture", "cauchy"])


@pytest.mark.parametrize("I", [make_fin(), make_density_zero(0.05), make_density_zero(0.3)], ids=lambda I: I.name)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(16, 400), kind=KINDS, delta=st.sampled_from([0.5, 0.1, 0.0123]))
def test_limsup_matches_scan(I, seed, n, kind, delta):
    v = continuous(seed, n, kind)
    assert ideal_limsup(v, I, delta, bound=None) == pytest.approx(scan_oracle(v, I, delta), abs=1e-12)


@given(seed=st.integers(0, 2**32 - 1), kind=KINDS)
def test_double_limsup_matches_scan(seed, kind):
    v = continuous(seed, (20, 20), kind)
    for I in (make_pringsheim(0.1), make_double_density(0.05)):
        assert ideal_limsup(v, I, 0.05, bound=None) == pytest.approx(scan_oracle(v, I, 0.05), abs=1e-12)


@given(arrays(float, st.integers(16, 300), elements=st.floats(-5, 5, allow_subnormal=False)))
def test_threshold_matches_linear_search(v):
    for I in (make_fin(), make_density_zero(0.1)):
        assert threshold_batch(v, I) == threshold_oracle(v, I)


def test_tail_oracle_for_fin():
    rng = np.random.default_rng(7)
    v = rng.normal(size=5000)
    tail = v[2500:]
    assert ideal_limsup(v, make_fin(), 1e-3) == pytest.approx(tail.max(), abs=1e-3)
    assert ideal_liminf(v, make_fin(), 1e-3) == pytest.approx(tail.min(), abs=1e-3)


def test_spike_examples():
    x = generate("sparse_spike(squares)", 10_000)
    r = scalar_limits(x, make_fin())
    assert (r.ilimsup, r.iliminf) == (1.0, 0.0)
    z = scalar_limits(x, make_density_zero())
    assert z.ilimsup == pytest.approx(0.0, abs=1e-2) and z.iliminf == 0.0
    assert is_scalar_ideal_convergent(x, make_density_zero()) == pytest.approx(0.0, abs=1e-2)
    assert is_scalar_ideal_convergent(x, make_fin()) is None


def test_report_shape():
    d = scalar_limits(generate("alt", 100), make_fin()).as_dict()
    assert d == {"ilimsup": 1.0, "iliminf": -1.0, "delta": 0.01, "N": 100}


def test_liminf_le_limsup(rng):
    for _ in range(20):
        v = rng.standard_cauchy(300).clip(-50, 50)
        for I in (make_fin(), make_density_zero()):
            assert ideal_liminf(v, I) <= ideal_limsup(v, I)


def test_unbounded():
    x = generate("alt_linear", 10_000)
    with pytest.raises(UnboundedSequenceError, match="not I-bounded"):
        ideal_limsup(x, make_density_zero())
    # with the check off, the top threshold is a huge data value
    assert ideal_limsup(x, make_density_zero(), bound=None) > 100


def test_invalid_delta():
    with pytest.raises(ValueError):
        ideal_limsup(np.zeros(20), make_fin(), 0.0)
