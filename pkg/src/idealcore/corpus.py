"""
Named test corpus: sequences paired with an ideal model and a window scale.

Each item also names an index set that is small for its model, used to
check that perturbing the sequence there leaves every core construction
unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ideal import FiniteIdealModel, parse_ideal
from .sequence import SequenceWindow, generate

__all__ = ["CORPUS", "CorpusItem", "corpus_item", "perturb", "small_support_mask"]

TRIANGLE = "[(0,0),(1,0),(0,1)]"
TETRAHEDRON = "[(0,0,0),(1,0,0),(0,1,0),(0,0,1)]"
OCTAHEDRON = "[(1,0,0),(-1,0,0),(0,1,0),(0,-1,0),(0,0,1),(0,0,-1)]"
PERTURB_AMPLITUDE = 5.0


def _squares(n):
    r = np.floor(np.sqrt(n) + 0.5).astype(np.int64)
    return r * r == n


def small_support_mask(model: FiniteIdealModel, scale: int) -> np.ndarray:
    """An index set that the model calls small, yet infinite in spirit.

    Fin: the first quarter of the window.  Density: perfect squares.
    Pringsheim: the L-shaped border below the corner.  e-ideal: rows and
    columns up to M/4.  Double density: the diagonal.
    """
    name = model.name
    if model.arity == "single":
        n = np.arange(1, scale + 1)
        if name.startswith("fin"):
            return n <= scale // 4
        return _squares(n)
    n, m = np.meshgrid(np.arange(1, scale + 1), np.arange(1, scale + 1), indexing="ij")
    if name.startswith("pringsheim"):
        b = math.ceil(model.params["theta_P"] * scale - 1e-9)
        return (n < b) | (m < b)
    if name.startswith("transpose(product"):
        return (n <= scale // 4) | (m <= scale // 4)
    return n == m


def perturb(x: SequenceWindow, mask: np.ndarray, amplitude: float = PERTURB_AMPLITUDE, seed: int = 0) -> SequenceWindow:
    """Add uniform noise in [-amplitude, amplitude]^k on the masked indices."""
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-amplitude, amplitude, size=x.values.shape) * mask[..., None]
    return SequenceWindow(x.values + noise, source=f"perturbed({x.source})")


@dataclass(frozen=True)
class CorpusItem:
    name: str
    sequence: str
    ideal: str
    scale: int
    note: str = ""

    def window(self) -> SequenceWindow:
        return generate(self.sequence, self.scale)

    def model(self) -> FiniteIdealModel:
        return parse_ideal(self.ideal)

    @property
    def dim(self) -> int:
        return self.window().dim

    def small_set(self) -> np.ndarray:
        return small_support_mask(self.model(), self.scale)


CORPUS: tuple[CorpusItem, ...] = (
    CorpusItem("alt_fin", "alt", "fin", 10_000, "cluster points ±1"),
    CorpusItem("alt_decay_fin", "alt_decay", "fin", 10_000, "cluster points ±1, approached from above at even n"),
    CorpusItem("spike_z", "sparse_spike(squares)", "density(0.05)", 10_000, "spikes on a density-zero set"),
    CorpusItem("spike_fin", "sparse_spike(squares)", "fin", 10_000, "spikes recur in every tail"),
    CorpusItem("alt_noise_z", "alt(noise=0.3, seed=1)", "density(0.05)", 10_000, "decaying noise"),
    CorpusItem("constant_fin", "constant(0.25)", "fin", 10_000, "singleton core"),
    CorpusItem(
        "triangle_z",
        f"cycle({TRIANGLE}, noise=5.0, noise_mode='sparse', seed=2)",
        "density(0.05)",
        10_000,
        "triangle cycle with large noise on the squares",
    ),
    CorpusItem("triangle_fin", f"cycle({TRIANGLE}, noise=0.2, seed=3)", "fin", 10_000, "triangle cycle with decaying noise"),
    CorpusItem("circle_fin", "rotation", "fin", 10_000, "golden-angle rotation; core is the unit disc"),
    CorpusItem("tetrahedron_z", f"cycle({TETRAHEDRON})", "density(0.05)", 10_000, "vertices of a tetrahedron"),
    CorpusItem("octahedron_fin", f"cycle({OCTAHEDRON}, noise=0.5, seed=4)", "fin", 10_000, "octahedron with decaying noise"),
    CorpusItem("double_alt_ip", "double_alt", "pringsheim(0.1)", 256, "(-1)^(n+m)"),
    CorpusItem("double_rows_ie", "double_alt_rows", "transpose(product(fin,fin))", 256, "(-1)^n, constant in m"),
    CorpusItem("double_rows_ip", "double_alt_rows", "pringsheim(0.1)", 256, "(-1)^n, constant in m"),
    CorpusItem("double_harmonic_zp", "double_harmonic", "double-density(0.05)", 256, "1/(n+m)"),
    CorpusItem("double_triangle_zp", f"double_cycle({TRIANGLE})", "double-density(0.05)", 256, "triangle along antidiagonals"),
)

_BY_NAME: dict[str, CorpusItem] = {item.name: item for item in CORPUS}


def corpus_item(name: str) -> CorpusItem:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown corpus item {name!r}; known: {sorted(_BY_NAME)}") from None
