from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from idealcore.geometry.lp import LPSizeError, lp_solve


def test_docstring_example():
    r = lp_solve([1.0], A_ub=[[1.0]], b_ub=[1.0], maximize=True)
    assert r.status == "optimal" and r.x.tolist() == [1.0]


def test_beale_cycling_example_terminates():
    # classic instance on which the largest-coefficient rule cycles
    c = [Fraction(-3, 4), 20, Fraction(-1, 2), 6]
    A = [[Fraction(1, 4), -8, -1, 9], [Fraction(1, 2), -12, Fraction(-1, 2), 3], [0, 0, 1, 0]]
    r = lp_solve(c, A_ub=A, b_ub=[0, 0, 1], exact=True)
    assert r.status == "optimal"
    assert r.value == Fraction(-5, 4)
    assert r.exact and isinstance(r.value, Fraction)


def test_redundant_constraints():
    A = [[1, 1], [1, 1], [2, 2], [1, 0]]
    r = lp_solve([-1, -1], A_ub=A, b_ub=[1, 1, 2, 1], exact=True)
    assert r.status == "optimal" and r.value == -1


def test_infeasible_has_farkas():
    A_ub = np.array([[1.0, 1.0], [-1.0, -1.0]])
    b_ub = np.array([1.0, -2.0])
    r = lp_solve([0, 0], A_ub=A_ub, b_ub=b_ub, exact=True)
    assert r.status == "infeasible"
    y = np.array([float(t) for t in r.farkas])
    assert np.all(y >= 0)
    assert np.all(y @ A_ub >= -1e-12)
    assert y @ b_ub < 0


def test_unbounded():
    r = lp_solve([-1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0])
    assert r.status == "unbounded"


def test_free_variables():
    r = lp_solve([1.0], A_ub=[[-1.0]], b_ub=[3.0], free=True)
    assert r.status == "optimal" and r.x[0] == pytest.approx(-3.0)


@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 6), n=st.integers(1, 6), exact=st.booleans())
def test_matches_highs(seed, m, n, exact):
    g = np.random.default_rng(seed)
    A = g.integers(-5, 6, size=(m, n)).astype(float)
    b = g.integers(0, 10, size=m).astype(float)
    c = g.integers(-5, 6, size=n).astype(float)
    # b >= 0 makes x = 0 feasible; the box makes the optimum finite
    A = np.vstack([A, np.eye(n)])
    b = np.r_[b, np.full(n, 10.0)]
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
    r = lp_solve(c, A_ub=A, b_ub=b, exact=exact)
    assert ref.status == 0 and r.status == "optimal"
    assert float(r.value) == pytest.approx(ref.fun, abs=1e-7)
    x = np.array([float(t) for t in r.x])
    assert np.all(A @ x <= b + 1e-9) and np.all(x >= -1e-12)


@given(seed=st.integers(0, 2**32 - 1))
def test_equality_rows_match_highs(seed):
    g = np.random.default_rng(seed)
    A = g.integers(-3, 4, size=(2, 5)).astype(float)
    x0 = g.integers(0, 3, size=5).astype(float)
    b = A @ x0
    c = g.integers(0, 5, size=5).astype(float)
    ref = linprog(c, A_eq=A, b_eq=b, method="highs")
    r = lp_solve(c, A_eq=A, b_eq=b, exact=True)
    assert r.status == "optimal"
    assert float(r.value) == pytest.approx(ref.fun, abs=1e-9)


def test_exact_mode_is_rational():
    r = lp_solve([-1, -1], A_ub=[[3, 1], [1, 3]], b_ub=[1, 1], exact=True)
    assert r.x.tolist() == [Fraction(1, 4), Fraction(1, 4)]


def test_size_guard():
    with pytest.raises(LPSizeError):
        lp_solve(np.zeros(20_001), A_ub=np.ones((1, 20_001)), b_ub=[1.0])
