"""
Euler summability means and the double-sequence convergence modes.

The Euler r-matrix has entries a[n, k] = C(n, k) (1 - r)^(n - k) r^k for
0 <= k <= n.  Arrays here are 0-based: ``y[i] = sum_{j <= i} a[i, j] x[j]``,
so y[i] is the transformed value at window label i + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import binom

from . import defaults
from .core import CoreReport, core_by_support
from .ideal import FiniteIdealModel, make_double_density, make_e_ideal, make_fin, make_pringsheim
from .sequence import SequenceWindow

__all__ = [
    "DOUBLE_MODES",
    "DoubleConvergence",
    "double_convergence",
    "euler_core",
    "euler_matrix",
    "euler_row",
    "euler_row_sums",
    "euler_transform",
]

R_GUARD = 4.0
# exp(700) is close to the largest finite double; guards the row scale factor
_LOG_LIMIT = 700.0
# coefficients below this fraction of the largest contribute nothing in double precision
_DROP = 1e-26


def _check_r(r: float) -> float:
    r = float(r)
    if not math.isfinite(r) or abs(r) > R_GUARD:
        raise OverflowError(f"|r| must be at most {R_GUARD:g}, got {r!r}")
    return r


def _row(n: int, r: float, lo: int = 0, hi: Optional[int] = None) -> np.ndarray:
    """Row n, computed as sign * (|1 - r| + |r|)^n * binom_pmf(k; n, p).

    Here p = |r| / (|1 - r| + |r|).  scipy's saddle-point pmf stays accurate
    to a few ulps at large n, where exp(gammaln(...)) would lose digits.  The
    scale factor is exactly 1 for 0 <= r <= 1.  ``lo`` and ``hi`` restrict
    the columns to lo..hi.
    """
    k = np.arange(lo, (n if hi is None else hi) + 1)
    s = 1.0 - r
    total = 1.0 if 0.0 <= r <= 1.0 else abs(s) + abs(r)
    log_scale = n * math.log(total)
    if log_scale > _LOG_LIMIT:
        raise OverflowError(f"Euler row {n} overflows for r = {r!r}")
    sign = np.where(((n - k) % 2 == 1) & (s < 0), -1.0, 1.0) * np.where((k % 2 == 1) & (r < 0), -1.0, 1.0)
    return sign * math.exp(log_scale) * binom.pmf(k, n, abs(r) / total)


def euler_row(n: int, r: float) -> np.ndarray:
    """Row n of the Euler r-matrix (length n + 1)."""
    return _row(int(n), _check_r(r))


def euler_matrix(size: int, r: float) -> np.ndarray:
    """Dense lower-triangular Euler matrix of the given size."""
    A = np.zeros((size, size))
    for n in range(size):
        A[n, : n + 1] = euler_row(n, r)
    return A


def euler_row_sums(size: int, r: float) -> np.ndarray:
    """Compensated row sums of the first ``size`` rows."""
    return np.array([math.fsum(euler_row(n, r)) for n in range(size)])


def _transform_values(x: np.ndarray, r: float) -> np.ndarray:
    N = len(x)
    out = np.empty_like(x)
    total = 1.0 if 0.0 <= r <= 1.0 else abs(1.0 - r) + abs(r)
    p = abs(r) / total
    for n in range(N):
        # the binomial mass beyond 15 standard deviations is far below the drop level
        sd = math.sqrt(n * p * (1.0 - p))
        lo = max(0, int(n * p - 15 * sd) - 10)
        hi = min(n, int(n * p + 15 * sd) + 10)
        coef = _row(n, r, lo, hi)
        keep = np.abs(coef) >= _DROP * np.max(np.abs(coef))
        xs = x[lo : hi + 1][keep]
        for j in range(x.shape[1]):
            out[n, j] = math.fsum(coef[keep] * xs[:, j])
    return out


def euler_transform(x: SequenceWindow, r: float) -> SequenceWindow:
    """Euler r-means of a single window in R or R^2 (complex values as pairs).

    Raises
    ------
    OverflowError
        If |r| > 4 or a row's coefficients exceed the double range.
    """
    r = _check_r(r)
    if x.arity != "single":
        raise ValueError("the Euler transform acts on single sequences")
    if x.dim > 2:
        raise ValueError("the Euler transform is defined here for k <= 2")
    y = _transform_values(np.asarray(x.values), r)
    return SequenceWindow(y, source=f"euler(r={r!r}, {x.source})")


def euler_core(
    x: SequenceWindow,
    r: float,
    delta: float = defaults.DELTA,
    directions: Optional[int] = None,
    *,
    bound: Optional[float] = defaults.BOUND,
) -> CoreReport:
    """Euler r-core: the Knopp (Fin) core of the transformed sequence."""
    y = euler_transform(x, r)
    rep = core_by_support(y, make_fin(), directions, delta, bound=bound)
    params = dict(rep.params, r=float(r))
    return CoreReport(rep.model, "euler_support", rep.result, params, rep.scale, rep.extra)


DOUBLE_MODES = {
    "pringsheim": make_pringsheim,
    "statistical": make_double_density,
    "e": make_e_ideal,
}


@dataclass(frozen=True)
class DoubleConvergence:
    mode: str
    model: str
    limit: Optional[np.ndarray]
    report: CoreReport

    @property
    def converges(self) -> bool:
        return self.limit is not None


def double_convergence(
    x: SequenceWindow,
    mode: str,
    tol: float = defaults.DELTA,
    delta: float = defaults.DELTA,
    directions: Optional[int] = None,
    *,
    bound: Optional[float] = defaults.BOUND,
    model: Optional[FiniteIdealModel] = None,
) -> DoubleConvergence:
    """Pringsheim, statistical or e-convergence of a double window.

    Each mode is ideal convergence under its ideal (I_P, Z_P or I_e): the
    limit exists when the support core has diameter at most ``tol`` and is
    then the midpoint of the core's bounding box.  The core itself (P-core,
    statistical P-core or e-core) is returned as well.
    """
    if mode not in DOUBLE_MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {sorted(DOUBLE_MODES)}")
    if x.arity != "double":
        raise ValueError("double_convergence needs a double window")
    I = model if model is not None else DOUBLE_MODES[mode]()
    rep = core_by_support(x, I, directions, delta, bound=bound)
    P = rep.result
    limit = None
    if not P.is_empty and P.diameter() <= tol:
        limit = P.center()
    return DoubleConvergence(mode, I.name, limit, rep)
