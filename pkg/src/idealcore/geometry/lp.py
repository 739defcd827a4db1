"""
Small dense two-phase simplex solver.

Runs either in exact rational arithmetic (``fractions.Fraction`` stored in
numpy object arrays) or in float64 with 1e-9 pivot tolerances.  Bland's
rule is used for both entering and leaving variables, so degenerate
problems terminate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "LPResult",
    "LPSizeError",
    "lp_solve",
    "MAX_CONSTRAINTS",
    "MAX_VARIABLES",
]

MAX_CONSTRAINTS = 10_000
MAX_VARIABLES = 10_000
# exact mode is used automatically below these sizes
EXACT_MAX_ROWS = 33
EXACT_MAX_COLS = 1_000
# float tableau entries kept in memory before switching to the dual route
_TABLEAU_BUDGET = 20_000_000

FLOAT_TOL = 1e-9


class LPSizeError(ValueError):
    """Raised when an instance exceeds the supported problem size."""


@dataclass(frozen=True)
class LPResult:
    """Outcome of :func:`lp_solve`.

    ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"`` or
    ``"infeasible_or_unbounded"`` (only possible on the dual route).
    For infeasible problems ``farkas`` holds a vector ``y`` over the
    constraint rows (inequalities first, then equalities) with
    ``y @ A >= 0`` on nonnegative variables, ``y @ A == 0`` on free
    variables, ``y >= 0`` on inequality rows and ``y @ b < 0``.
    """

    status: str
    x: Optional[np.ndarray]
    value: Optional[Union[float, Fraction]]
    farkas: Optional[np.ndarray] = None
    exact: bool = False
    iterations: int = 0

    @property
    def success(self) -> bool:
        return self.status == "optimal"


def _as_matrix(a, n_cols: int, exact: bool) -> np.ndarray:
    if a is None:
        return np.zeros((0, n_cols), dtype=object if exact else float)
    if exact:
        arr = np.array(a, dtype=object)
        arr = arr.reshape(-1, n_cols) if arr.size else np.zeros((0, n_cols), dtype=object)
        return np.vectorize(_to_fraction, otypes=[object])(arr) if arr.size else arr
    arr = np.asarray(a, dtype=float)
    return arr.reshape(-1, n_cols) if arr.size else np.zeros((0, n_cols))


def _as_vector(v, exact: bool) -> np.ndarray:
    if v is None:
        return np.zeros(0, dtype=object if exact else float)
    if exact:
        arr = np.array(v, dtype=object).ravel()
        return np.array([_to_fraction(t) for t in arr], dtype=object)
    return np.asarray(v, dtype=float).ravel()


def _to_fraction(t) -> Fraction:
    if isinstance(t, Fraction):
        return t
    if isinstance(t, (int, np.integer)):
        return Fraction(int(t))
    f = float(t)
    if not np.isfinite(f):
        raise ValueError("LP data must be finite")
    return Fraction(f)


class _Tableau:
    """Dense tableau ``[A | b]`` plus reduced-cost row, with basis bookkeeping."""

    def __init__(self, A: np.ndarray, b: np.ndarray, exact: bool):
        self.exact = exact
        self.tol = 0 if exact else FLOAT_TOL
        m, n = A.shape
        self.m, self.n = m, n
        dtype = object if exact else float
        T = np.zeros((m + 1, n + 1), dtype=dtype)
        if exact:
            T[:, :] = Fraction(0)
        T[:m, :n] = A
        T[:m, n] = b
        self.T = T
        self.basis = [-1] * m
        self.iterations = 0

    def set_costs(self, cost: np.ndarray) -> None:
        # reduced costs r = c - c_B B^{-1} A, objective cell holds -c_B B^{-1} b
        T = self.T
        row = np.zeros(self.n + 1, dtype=T.dtype)
        if self.exact:
            row[:] = Fraction(0)
        row[: self.n] = cost
        c_b = np.array([cost[j] for j in self.basis], dtype=T.dtype)
        if self.m:
            row = row - c_b @ T[: self.m]
        T[self.m] = row

    def pivot(self, i: int, j: int) -> None:
        T = self.T
        T[i] = T[i] / T[i, j]
        col = T[:, j].copy()
        col[i] = 0
        nz = np.flatnonzero(col != 0) if self.exact else np.flatnonzero(col)
        if nz.size:
            T[nz] = T[nz] - np.outer(col[nz], T[i])
        if not self.exact:
            T[:, j] = 0.0
            T[i, j] = 1.0
        self.basis[i] = j
        self.iterations += 1

    def run(self, allowed: np.ndarray, max_iter: int = 50_000) -> str:
        """Iterate to optimality over the columns flagged in ``allowed``."""
        T, m, tol = self.T, self.m, self.tol
        for _ in range(max_iter):
            r = T[m, : self.n]
            neg = np.asarray(r < -tol, dtype=bool) & allowed
            cand = np.flatnonzero(neg)
            if cand.size == 0:
                return "optimal"
            j = int(cand[0])
            col = T[:m, j]
            pos = np.flatnonzero(np.asarray(col > tol, dtype=bool))
            if pos.size == 0:
                return "unbounded"
            ratios = T[pos, self.n] / col[pos]
            best = ratios.min()
            if self.exact:
                ties = pos[np.asarray(ratios == best, dtype=bool)]
            else:
                ties = pos[ratios <= best + FLOAT_TOL * max(1.0, abs(best))]
            basis = np.asarray(self.basis)
            i = ties[np.argmin(basis[ties])]
            self.pivot(int(i), j)
        raise RuntimeError("simplex iteration limit reached")


def _solve_standard(c, A, b, exact: bool, want_duals: bool = False):
    """Solve ``min c x  s.t.  A x = b, x >= 0``.

    Returns ``(status, x, value, y, iterations)``; ``y`` is a Farkas vector
    when infeasible, or the simplex multipliers when optimal and
    ``want_duals`` is set.
    """
    m, n = A.shape
    sign = np.array([(-1 if v < 0 else 1) for v in b], dtype=object if exact else int)
    if exact:
        A = A * sign[:, None]
        b = b * sign
    else:
        A = A * sign[:, None]
        b = b * sign

    # reuse existing unit columns as the starting basis where possible
    start_col = [-1] * m
    if m:
        nonzero = np.asarray(A != 0, dtype=bool)
        single = np.flatnonzero(nonzero.sum(axis=0) == 1)
        for j in single:
            i = int(np.argmax(nonzero[:, j]))
            if A[i, j] == 1 and start_col[i] < 0:
                start_col[i] = int(j)
    art_rows = [i for i in range(m) if start_col[i] < 0]
    n_art = len(art_rows)
    dtype = object if exact else float
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    A_art = np.full((m, n_art), zero, dtype=dtype)
    for t, i in enumerate(art_rows):
        A_art[i, t] = one
        start_col[i] = n + t
    A_full = np.concatenate([A, A_art], axis=1) if n_art else A.copy()
    tab = _Tableau(A_full, b, exact)
    tab.basis = list(start_col)
    n_full = n + n_art

    cost1 = np.full(n_full, zero, dtype=dtype)
    cost1[n:] = one
    tab.set_costs(cost1)
    everything = np.ones(n_full, dtype=bool)
    status = tab.run(everything)
    assert status == "optimal"
    phase1 = -tab.T[m, n_full]
    tol = 0 if exact else FLOAT_TOL * max(1.0, float(np.max(np.abs(np.asarray(b, dtype=float)))) if m else 1.0)
    if phase1 > tol:
        r = tab.T[m, :n_full]
        y = np.array([cost1[start_col[i]] - r[start_col[i]] for i in range(m)], dtype=dtype)
        # back to the caller's sign convention: y A <= 0, y b > 0 -> negate
        y = -(y * sign)
        return "infeasible", None, None, y, tab.iterations

    # drive remaining artificials out of the basis, dropping redundant rows
    keep_rows = []
    for i in range(m):
        j = tab.basis[i]
        if j >= n:
            row = tab.T[i, :n]
            nz = [t for t in range(n) if (row[t] != 0 if exact else abs(row[t]) > FLOAT_TOL)]
            if nz:
                tab.pivot(i, nz[0])
                keep_rows.append(i)
        else:
            keep_rows.append(i)

    cost2 = np.full(n_full, zero, dtype=dtype)
    cost2[:n] = c
    if len(keep_rows) < m:
        rows = keep_rows + [m]
        tab.T = tab.T[rows]
        tab.basis = [tab.basis[i] for i in keep_rows]
        tab.m = len(keep_rows)
    tab.set_costs(cost2)
    allowed = np.zeros(n_full, dtype=bool)
    allowed[:n] = True
    status = tab.run(allowed)
    if status == "unbounded":
        return "unbounded", None, None, None, tab.iterations
    x = np.full(n, zero, dtype=dtype)
    for i, j in enumerate(tab.basis):
        if j < n:
            x[j] = tab.T[i, tab.n]
    value = -tab.T[tab.m, tab.n]
    y = None
    if want_duals:
        r = tab.T[tab.m, :n_full]
        y = np.full(m, zero, dtype=dtype)
        kept = set(keep_rows)
        for i in range(m):
            if i in kept or start_col[i] < n:
                j = start_col[i]
                y[i] = cost2[j] - r[j]
        y = y * sign
    return "optimal", x, value, y, tab.iterations


def _choose_exact(exact, rows: int, cols: int) -> bool:
    if exact == "auto":
        return rows <= EXACT_MAX_ROWS and cols <= EXACT_MAX_COLS
    return bool(exact)


def lp_solve(
    c: Sequence[float],
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    *,
    free: Union[bool, Sequence[bool]] = False,
    maximize: bool = False,
    exact: Union[bool, str] = "auto",
) -> LPResult:
    """Solve a small linear program.

    Minimizes (or maximizes) ``c @ x`` subject to ``A_ub @ x <= b_ub`` and
    ``A_eq @ x == b_eq``.  Variables are nonnegative unless flagged in
    ``free``.

    Parameters
    ----------
    exact : bool or "auto"
        Rational arithmetic.  ``"auto"`` picks it for instances with at most
        33 standard-form rows and 1000 columns.

    Examples
    --------
    >>> lp_solve([1.0], A_ub=[[1.0]], b_ub=[1.0], maximize=True).x
    array([1.])
    """
    c_arr = np.asarray(c, dtype=object).ravel()
    n = c_arr.size
    if n == 0:
        raise ValueError("objective must have at least one variable")
    if n > MAX_VARIABLES:
        raise LPSizeError(f"{n} variables exceeds limit {MAX_VARIABLES}")
    free_mask = np.broadcast_to(np.asarray(free, dtype=bool), (n,)).copy()

    a_ub = np.asarray(A_ub if A_ub is not None else np.zeros((0, n)), dtype=object).reshape(-1, n)
    a_eq = np.asarray(A_eq if A_eq is not None else np.zeros((0, n)), dtype=object).reshape(-1, n)
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    if m_ub + m_eq > MAX_CONSTRAINTS:
        raise LPSizeError(f"{m_ub + m_eq} constraints exceeds limit {MAX_CONSTRAINTS}")
    if b_ub is not None and len(np.ravel(b_ub)) != m_ub:
        raise ValueError("A_ub and b_ub disagree in length")
    if b_eq is not None and len(np.ravel(b_eq)) != m_eq:
        raise ValueError("A_eq and b_eq disagree in length")

    n_std = n + int(free_mask.sum()) + m_ub
    rows = m_ub + m_eq
    use_exact = _choose_exact(exact, rows, n_std + rows)

    if not use_exact and rows * (n_std + rows) > _TABLEAU_BUDGET:
        if m_eq == 0 and free_mask.all():
            return _solve_via_dual(c_arr, a_ub, b_ub, maximize)
        raise LPSizeError("instance too large for the dense tableau")

    cv = _as_vector(c_arr, use_exact)
    if maximize:
        cv = -cv
    Aub = _as_matrix(a_ub, n, use_exact)
    Aeq = _as_matrix(a_eq, n, use_exact)
    bub = _as_vector(b_ub, use_exact) if m_ub else _as_vector([], use_exact)
    beq = _as_vector(b_eq, use_exact) if m_eq else _as_vector([], use_exact)

    # x = x_pos - x_neg for free variables; slacks for inequality rows
    free_idx = np.flatnonzero(free_mask)
    blocks_ub = [Aub, -Aub[:, free_idx]]
    blocks_eq = [Aeq, -Aeq[:, free_idx]]
    dtype = object if use_exact else float
    zero = Fraction(0) if use_exact else 0.0
    one = Fraction(1) if use_exact else 1.0
    slack_ub = np.full((m_ub, m_ub), zero, dtype=dtype)
    for i in range(m_ub):
        slack_ub[i, i] = one
    slack_eq = np.full((m_eq, m_ub), zero, dtype=dtype)
    A_std = np.concatenate(
        [
            np.concatenate(blocks_ub + [slack_ub], axis=1),
            np.concatenate(blocks_eq + [slack_eq], axis=1),
        ],
        axis=0,
    )
    b_std = np.concatenate([bub, beq])
    c_std = np.concatenate([cv, -cv[free_idx], np.full(m_ub, zero, dtype=dtype)])

    status, xs, value, y, iters = _solve_standard(c_std, A_std, b_std, use_exact)
    if status == "infeasible":
        return LPResult("infeasible", None, None, farkas=y, exact=use_exact, iterations=iters)
    if status == "unbounded":
        return LPResult("unbounded", None, None, exact=use_exact, iterations=iters)
    x = xs[:n].copy()
    if free_idx.size:
        x[free_idx] = x[free_idx] - xs[n : n + free_idx.size]
    if maximize:
        value = -value
    if not use_exact:
        x = np.asarray(x, dtype=float)
        value = float(value)
    return LPResult("optimal", x, value, exact=use_exact, iterations=iters)


def _solve_via_dual(c, a_ub, b_ub, maximize: bool) -> LPResult:
    # min c x s.t. A x <= b (x free)  <->  min b y s.t. A^T y = -c, y >= 0
    A = np.asarray(a_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float).ravel()
    cv = np.asarray(c, dtype=float).ravel()
    if maximize:
        cv = -cv
    status, y, dval, pi, iters = _solve_standard(b, A.T.copy(), -cv, exact=False, want_duals=True)
    if status == "unbounded":
        return LPResult("infeasible", None, None, iterations=iters)
    if status == "infeasible":
        return LPResult("infeasible_or_unbounded", None, None, iterations=iters)
    x = np.asarray(pi, dtype=float)
    value = float(cv @ x)
    if maximize:
        value = -value
    return LPResult("optimal", x, value, iterations=iters)
