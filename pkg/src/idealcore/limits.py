"""
Ideal limit superior and inferior of real sequences at finite scale.

The ideal limsup of x is max Γ_x(I).  At scale N it is located through the
threshold

    w* = min { t in values(x) : {n : x_n > t} is I-small },

which exists because the set shrinks as t grows and is empty at t = max x.
On the value grid lo, lo + delta, ..., hi the reported limsup is the largest
grid value v with {n : x_n > v - delta} not small.  That set is not small
exactly when v - delta < w*, so v is hi when hi - delta < w* and otherwise
the first grid value at or above w*.  Bisection over the sorted values finds w* in log2(N)
smallness evaluations per row, all rows advancing together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import defaults
from .ideal import FiniteIdealModel, IdealSpecError
from .sequence import SequenceWindow

__all__ = [
    "ScalarLimitReport",
    "UnboundedSequenceError",
    "check_bounded",
    "ideal_liminf",
    "ideal_limsup",
    "is_scalar_ideal_convergent",
    "limsup_batch",
    "scalar_limits",
    "threshold_batch",
]

# smallness evaluations are chunked to keep boolean masks near this size
_CHUNK_CELLS = 1 << 24


class UnboundedSequenceError(ValueError):
    """The window is not I-bounded at the configured bound."""

    def __init__(self, model: str, bound: float, count: int, scale: int):
        self.model, self.bound, self.count, self.scale = model, bound, count, scale
        super().__init__(
            f"sequence is not I-bounded under {model}: {count} terms exceed "
            f"norm {bound:g} at scale {scale}, and that index set is not small"
        )


@dataclass(frozen=True)
class ScalarLimitReport:
    ilimsup: float
    iliminf: float
    delta: float
    scale: int
    model: str = ""

    def as_dict(self) -> dict:
        return {"ilimsup": self.ilimsup, "iliminf": self.iliminf, "delta": self.delta, "N": self.scale}


def _event_values(x, I: FiniteIdealModel) -> np.ndarray:
    """Values as an array whose trailing axes index the window, one component."""
    if isinstance(x, SequenceWindow):
        if x.arity != I.arity:
            raise IdealSpecError(f"{I.name} is {I.arity}-arity but the window is {x.arity}")
        if x.dim != 1:
            raise ValueError("scalar limits need a real (k = 1) window")
        return x.values[..., 0]
    v = np.asarray(x, dtype=float)
    if v.ndim < I.event_ndim:
        raise ValueError("window has too few axes for the model")
    return v


def check_bounded(x, I: FiniteIdealModel, bound: float = defaults.BOUND) -> None:
    """Raise :class:`UnboundedSequenceError` unless {n : ‖x_n‖ > bound} is small."""
    if isinstance(x, SequenceWindow):
        norms = np.linalg.norm(x.values, axis=-1)
    else:
        norms = np.abs(np.asarray(x, dtype=float))
    outside = norms > bound
    if not I.small(outside):
        raise UnboundedSequenceError(I.name, bound, int(outside.sum()), outside.shape[-1])


def _thresholds(values: np.ndarray, I: FiniteIdealModel) -> np.ndarray:
    """w* for each leading-axis row of ``values`` (rows flattened to (B, ...))."""
    ev = I.event_ndim
    batch_shape = values.shape[:-ev]
    event_shape = values.shape[-ev:]
    X = values.reshape((-1,) + event_shape)
    B = X.shape[0]
    S = np.sort(X.reshape(B, -1), axis=1)
    n = S.shape[1]
    out = np.empty(B)
    rows_per_chunk = max(1, _CHUNK_CELLS // max(n, 1))
    expand = (slice(None),) + (None,) * ev
    for s in range(0, B, rows_per_chunk):
        Xc, Sc = X[s : s + rows_per_chunk], S[s : s + rows_per_chunk]
        r = np.arange(len(Xc))
        # invariant: index hi satisfies the smallness predicate, lo does not
        # (lo = -1 is the virtual value below every term)
        lo = np.full(len(Xc), -1)
        hi = np.full(len(Xc), n - 1)
        while np.any(hi - lo > 1):
            mid = (lo + hi) // 2
            active = hi - lo > 1
            t = Sc[r, np.maximum(mid, 0)]
            small = I.small(Xc > t[expand])
            go_hi = active & small
            go_lo = active & ~small
            hi = np.where(go_hi, mid, hi)
            lo = np.where(go_lo, mid, lo)
        out[s : s + len(Xc)] = Sc[r, hi]
    return out.reshape(batch_shape)


def threshold_batch(values, I: FiniteIdealModel) -> np.ndarray:
    """Data-level thresholds w* for every row; the value a term actually takes."""
    return _thresholds(np.asarray(values, dtype=float), I)


def _snap(w: np.ndarray, lo: np.ndarray, hi: np.ndarray, delta: float) -> np.ndarray:
    q = (w - lo) / delta
    j = np.round(q)
    on_grid = np.abs(q - j) <= 1e-9
    up = np.minimum(lo + np.ceil(q) * delta, hi)
    # hi closes the grid, so it wins whenever it lies within delta of w
    return np.where(hi - delta < w, hi, np.where(on_grid, w, up))


def limsup_batch(values, I: FiniteIdealModel, delta: float = defaults.DELTA) -> np.ndarray:
    """Grid ideal limsup for every row of ``values``.

    ``values`` has shape ``batch + window``; the window axes are the last
    one (single models) or two (double models).  No boundedness check.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    v = np.asarray(values, dtype=float)
    ev = I.event_ndim
    axes = tuple(range(v.ndim - ev, v.ndim))
    lo, hi = v.min(axis=axes), v.max(axis=axes)
    return _snap(_thresholds(v, I), lo, hi, float(delta))


def ideal_limsup(
    x,
    I: FiniteIdealModel,
    delta: float = defaults.DELTA,
    *,
    bound: Optional[float] = defaults.BOUND,
) -> float:
    """Finite-scale I-limsup of a real window.

    Parameters
    ----------
    x : SequenceWindow or array
        Real window (k = 1), or a raw array of values on the window.
    I : FiniteIdealModel
        Model whose arity matches the window.
    delta : float
        Grid step on the value axis.
    bound : float or None
        I-boundedness cutoff; ``None`` skips the check.

    Raises
    ------
    UnboundedSequenceError
        When {n : |x_n| > bound} is not small.
    """
    v = _event_values(x, I)
    if bound is not None:
        check_bounded(v, I, bound)
    return float(limsup_batch(v, I, delta))


def ideal_liminf(x, I: FiniteIdealModel, delta: float = defaults.DELTA, *, bound: Optional[float] = defaults.BOUND) -> float:
    """Finite-scale I-liminf, defined as -limsup(-x)."""
    v = _event_values(x, I)
    return -ideal_limsup(-v, I, delta, bound=bound)


def scalar_limits(x, I: FiniteIdealModel, delta: float = defaults.DELTA, *, bound: Optional[float] = defaults.BOUND) -> ScalarLimitReport:
    v = _event_values(x, I)
    if bound is not None:
        check_bounded(v, I, bound)
    both = limsup_batch(np.stack([v, -v]), I, delta)
    return ScalarLimitReport(float(both[0]), float(-both[1]), float(delta), int(v.shape[-1]), I.name)


def is_scalar_ideal_convergent(
    x,
    I: FiniteIdealModel,
    tol: float = defaults.DELTA,
    delta: float = defaults.DELTA,
    *,
    bound: Optional[float] = defaults.BOUND,
) -> Optional[float]:
    """Limit (midpoint of liminf and limsup) when they differ by at most ``tol``."""
    rep = scalar_limits(x, I, delta, bound=bound)
    if rep.ilimsup - rep.iliminf <= tol:
        return 0.5 * (rep.ilimsup + rep.iliminf)
    return None
