"""
Estimation of the ideal cluster set Γ_x(I) by nested ℓ∞ cell refinement.

A cell is the closed box of half-width eps around its center.  It survives
when the indices of terms inside it form a set that is not I-small.  Each
surviving cell splits into 2^k children of half the width.  Children cover
the parent, and a child's hit set is contained in the parent's, so by
monotonicity of smallness the survivors at the final width are exactly the
cells of the same lattice that a full-grid scan would keep.  No halo of
neighbouring cells is needed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import defaults
from .ideal import FiniteIdealModel, IdealSpecError
from .limits import check_bounded
from .sequence import SequenceWindow

__all__ = ["ClusterSet", "estimate_clusters", "grid_cells", "is_cluster_point", "surviving_cells"]

# relative slack on cell membership, so points on shared faces count for both cells
_EDGE_SLACK = 1e-9
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class ClusterSet:
    """Cell centers flagged as I-cluster candidates at half-width ``radius``."""

    points: np.ndarray
    radius: float
    scale: int
    model: str
    box: tuple = field(default=None, repr=False)
    rounds: int = 0

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def is_empty(self) -> bool:
        return len(self.points) == 0

    def __len__(self) -> int:
        return len(self.points)

    def as_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "radius": self.radius,
            "scale": self.scale,
            "model": self.model,
            "rounds": self.rounds,
        }


def _window(x, I: FiniteIdealModel) -> SequenceWindow:
    if not isinstance(x, SequenceWindow):
        x = SequenceWindow(np.asarray(x, dtype=float))
    if x.arity != I.arity:
        raise IdealSpecError(f"{I.name} is {I.arity}-arity but the window is {x.arity}")
    return x


def _hit_masks(values: np.ndarray, centers: np.ndarray, eps: float) -> np.ndarray:
    """Boolean (cells, *window) array: term inside the closed cell of each center."""
    r = eps * (1.0 + _EDGE_SLACK)
    pts = values.reshape(-1, values.shape[-1])
    hits = np.ones((len(centers), len(pts)), dtype=bool)
    for j in range(values.shape[-1]):
        hits &= np.abs(pts[None, :, j] - centers[:, None, j]) <= r
    return hits.reshape((len(centers),) + values.shape[:-1])


def surviving_cells(x, I: FiniteIdealModel, centers, eps: float) -> np.ndarray:
    """Boolean flags: is the hit set of each cell not I-small?"""
    x = _window(x, I)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if len(centers) == 0:
        return np.zeros(0, dtype=bool)
    per = max(1, _CHUNK_CELLS // len(x))
    out = np.empty(len(centers), dtype=bool)
    for s in range(0, len(centers), per):
        c = centers[s : s + per]
        out[s : s + len(c)] = ~I.small(_hit_masks(x.values, c, eps))
    return out


def is_cluster_point(x, I: FiniteIdealModel, p, eps: float, *, bound: Optional[float] = defaults.BOUND) -> bool:
    """True iff {n : ‖x_n - p‖_∞ ≤ eps} is not I-small."""
    x = _window(x, I)
    if bound is not None:
        check_bounded(x, I, bound)
    p = np.asarray(p, dtype=float).reshape(1, -1)
    if p.shape[1] != x.dim:
        raise ValueError("dimension mismatch")
    return bool(surviving_cells(x, I, p, eps)[0])


def _data_box(x: SequenceWindow, bound: Optional[float]):
    pts = x.flat
    if bound is not None:
        pts = pts[np.linalg.norm(pts, axis=1) <= bound]
    if len(pts) == 0:
        return None
    return pts.min(axis=0), pts.max(axis=0)


def grid_cells(lo, hi, eps0: float, levels: int = 0) -> tuple[np.ndarray, float]:
    """Centers of the coarse cover of [lo, hi] refined ``levels`` times.

    The coarse lattice has half-width ``eps0`` and is centered on the box;
    each level halves the width.  Returns (centers, half-width).
    """
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    eps = eps0 / 2**levels
    axes = []
    for side, c in zip(hi - lo, mid):
        n0 = max(1, math.ceil(side / (2 * eps0) - 1e-12))
        n = n0 * 2**levels
        axes.append(c + eps * (2 * np.arange(n) - n + 1))
    grid = np.array(list(itertools.product(*axes)), dtype=float)
    return grid, eps


def _children(centers: np.ndarray, eps: float) -> np.ndarray:
    k = centers.shape[1]
    offsets = np.array(list(itertools.product((-0.5, 0.5), repeat=k))) * eps
    return (centers[:, None, :] + offsets[None, :, :]).reshape(-1, k)


def estimate_clusters(
    x,
    I: FiniteIdealModel,
    eps_final: float = defaults.EPS_FINAL,
    rounds: int = defaults.MAX_ROUNDS,
    *,
    box=None,
    bound: Optional[float] = defaults.BOUND,
) -> ClusterSet:
    """Adaptive grid estimate of Γ_x(I).

    Parameters
    ----------
    x : SequenceWindow
    I : FiniteIdealModel
    eps_final : float
        Stop once the cell half-width is at most this value.
    rounds : int
        Maximum number of subdivision rounds.
    box : (lo, hi), optional
        Search box.  Defaults to the bounding box of the terms with norm at
        most ``bound`` (all terms when ``bound`` is None).
    bound : float or None
        I-boundedness cutoff checked before the search; None disables the
        check.

    Returns
    -------
    ClusterSet
        Possibly empty.
    """
    if not eps_final > 0:
        raise ValueError("eps_final must be positive")
    x = _window(x, I)
    if bound is not None:
        check_bounded(x, I, bound)
    if box is None:
        box = _data_box(x, bound)
    else:
        lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), (x.dim,)).copy() for b in box)
        box = (lo, hi)
    empty = np.zeros((0, x.dim))
    if box is None:
        return ClusterSet(empty, float(eps_final), x.scale, I.name, None, 0)
    lo, hi = box
    D = float(np.max(hi - lo))
    eps0 = D / 8 if D / 8 > eps_final else float(eps_final)
    centers, eps = grid_cells(lo, hi, eps0)
    done = 0
    keep = surviving_cells(x, I, centers, eps)
    centers = centers[keep]
    while eps > eps_final * (1 + 1e-12) and done < rounds and len(centers):
        centers = _children(centers, eps)
        eps /= 2
        done += 1
        centers = centers[surviving_cells(x, I, centers, eps)]
    return ClusterSet(centers, float(eps), x.scale, I.name, (lo.tolist(), hi.tolist()), done)
