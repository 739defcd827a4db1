"""
Finite-scale models of ideals on the naturals and on pairs of naturals.

An ideal is a family of "small" index sets.  At a finite scale N (or a
square window [1, M]^2 for double sequences) a model decides smallness of
an index set from its trace on the window.  Every model here evaluates a
boolean mask, vectorized over leading batch axes, so many candidate sets
can be tested in one call.

Built-in models and their finite rules:

``fin``
    A is small iff it misses the tail (ceil(N/2), N].
``density(theta)``
    A is small iff |A ∩ (N0, N]| / (N - N0) < theta, with N0 = ceil(N/10).
``pringsheim(theta_p)``
    A is small iff it misses the corner [b, M]^2, b = ceil(theta_p * M).
``double-density(theta)``
    A is small iff its density in the corner [b, M]^2, b = ceil(M/10),
    is below theta.
``product(I, J)``
    A is small iff the rows k whose section A_k is not J-small form an
    I-small set.
``transpose(I)``
    A is small iff its transpose is I-small.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np

__all__ = [
    "FiniteIdealModel",
    "IdealSpecError",
    "IndexSet",
    "fubini_product",
    "make_density_zero",
    "make_double_density",
    "make_e_ideal",
    "make_fin",
    "make_pringsheim",
    "parse_ideal",
    "transpose",
]

SINGLE = "single"
DOUBLE = "double"


class IdealSpecError(ValueError):
    """Bad ideal parameters, arity mismatch or unparsable ideal spec."""


@dataclass(frozen=True)
class IndexSet:
    """A subset of [1, N] or [1, M]^2 given by a predicate and/or explicit indices.

    ``predicate`` is vectorized over 1-based index arrays: ``predicate(n)``
    for single sets, ``predicate(n, m)`` for double sets.  ``indices`` is a
    sorted array of 1-based indices (shape (r,) or (r, 2)).
    """

    arity: str = SINGLE
    predicate: Optional[Callable] = field(default=None, compare=False)
    indices: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.arity not in (SINGLE, DOUBLE):
            raise IdealSpecError(f"unknown arity {self.arity!r}")
        if self.predicate is None and self.indices is None:
            object.__setattr__(self, "indices", np.zeros((0,) if self.arity == SINGLE else (0, 2), dtype=int))
        if self.indices is not None:
            idx = np.asarray(self.indices, dtype=int)
            if self.arity == SINGLE:
                idx = np.unique(idx.ravel())
            else:
                idx = np.unique(idx.reshape(-1, 2), axis=0)
            if idx.size and idx.min() < 1:
                raise IdealSpecError("indices are 1-based")
            object.__setattr__(self, "indices", idx)

    @classmethod
    def from_indices(cls, indices, arity: str = SINGLE) -> "IndexSet":
        return cls(arity=arity, indices=np.asarray(indices, dtype=int))

    @classmethod
    def from_predicate(cls, predicate: Callable, arity: str = SINGLE) -> "IndexSet":
        return cls(arity=arity, predicate=predicate)

    @classmethod
    def from_mask(cls, mask) -> "IndexSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim == 1:
            return cls(arity=SINGLE, indices=np.flatnonzero(mask) + 1)
        if mask.ndim == 2:
            return cls(arity=DOUBLE, indices=np.argwhere(mask) + 1)
        raise IdealSpecError("mask must be 1- or 2-dimensional")

    def mask(self, scale: int) -> np.ndarray:
        """Boolean membership on the window of the given scale."""
        if self.predicate is not None:
            if self.arity == SINGLE:
                n = np.arange(1, scale + 1)
                out = np.broadcast_to(np.asarray(self.predicate(n), dtype=bool), (scale,))
            else:
                n, m = np.meshgrid(np.arange(1, scale + 1), np.arange(1, scale + 1), indexing="ij")
                out = np.broadcast_to(np.asarray(self.predicate(n, m), dtype=bool), (scale, scale))
            return np.array(out)
        shape = (scale,) if self.arity == SINGLE else (scale, scale)
        out = np.zeros(shape, dtype=bool)
        idx = self.indices
        if self.arity == SINGLE:
            idx = idx[idx <= scale]
            out[idx - 1] = True
        else:
            idx = idx[(idx <= scale).all(axis=1)]
            out[idx[:, 0] - 1, idx[:, 1] - 1] = True
        return out

    def consistent(self, scale: int) -> bool:
        """When both descriptions are present, do they agree on the window?"""
        if self.predicate is None or self.indices is None:
            return True
        explicit = IndexSet(arity=self.arity, indices=self.indices).mask(scale)
        return bool(np.array_equal(explicit, self.mask(scale)))


MaskLike = Union[IndexSet, np.ndarray]


@dataclass(frozen=True)
class FiniteIdealModel:
    """Scale-indexed smallness verdict standing in for an ideal.

    ``batch`` maps a boolean array whose trailing axis (single) or trailing
    two axes (double) index the window to a boolean array of verdicts over
    the leading axes.
    """

    name: str
    arity: str
    params: Mapping[str, float]
    batch: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    @property
    def event_ndim(self) -> int:
        return 1 if self.arity == SINGLE else 2

    def small(self, masks: np.ndarray) -> np.ndarray:
        """Vectorized smallness over leading axes of a boolean array."""
        masks = np.asarray(masks, dtype=bool)
        if masks.ndim < self.event_ndim:
            raise IdealSpecError(f"{self.name} expects {self.arity} index masks")
        if self.arity == DOUBLE and masks.shape[-1] != masks.shape[-2]:
            raise IdealSpecError("double windows must be square")
        return np.asarray(self.batch(masks), dtype=bool)

    def _as_mask(self, A: MaskLike, scale: Optional[int]) -> np.ndarray:
        if isinstance(A, IndexSet):
            if A.arity != self.arity:
                raise IdealSpecError(f"{self.name} is {self.arity}-arity, index set is {A.arity}")
            if scale is None:
                raise IdealSpecError("scale required for an IndexSet")
            return A.mask(scale)
        mask = np.asarray(A, dtype=bool)
        if mask.ndim != self.event_ndim:
            raise IdealSpecError(f"{self.name} expects a {self.event_ndim}-d mask")
        if scale is not None and mask.shape[-1] != scale:
            raise IdealSpecError("mask does not match the scale")
        return mask

    def smallness(self, A: MaskLike, scale: Optional[int] = None) -> bool:
        """Is ``A`` small at this scale?"""
        return bool(self.small(self._as_mask(A, scale)))

    def largeness(self, A: MaskLike, scale: Optional[int] = None) -> bool:
        """Is ``A`` in the dual filter, i.e. is its complement small?"""
        return bool(self.small(~self._as_mask(A, scale)))

    def __str__(self) -> str:
        return self.name


def _ceil(x: float) -> int:
    # absorb float noise such as 0.1 * 30 = 3.0000000000000004
    return math.ceil(x - 1e-9)


def _check_fraction(value: float, lo: float, hi: float, label: str) -> float:
    value = float(value)
    if not (lo < value < hi):
        raise IdealSpecError(f"{label} must lie in ({lo}, {hi}), got {value}")
    return value


def _fmt(v: float) -> str:
    return repr(float(v))


def make_fin(tail: float = 0.5) -> FiniteIdealModel:
    """Finite sets: small iff the set misses the tail window (ceil(tail*N), N]."""
    tail = _check_fraction(tail, 0.0, 1.0, "tail")

    def batch(masks):
        N = masks.shape[-1]
        start = min(_ceil(tail * N), N - 1)
        return ~masks[..., start:].any(axis=-1)

    name = "fin" if tail == 0.5 else f"fin(tail={_fmt(tail)})"
    return FiniteIdealModel(name, SINGLE, {"tail": tail}, batch)


def make_density_zero(theta: float = 0.05, burn_in: float = 0.1) -> FiniteIdealModel:
    """Asymptotic density zero: relative count after the burn-in below ``theta``."""
    theta = _check_fraction(theta, 0.0, 1.0, "theta")
    burn_in = float(burn_in)
    if not (0.0 <= burn_in < 1.0):
        raise IdealSpecError(f"burn_in must lie in [0, 1), got {burn_in}")

    def batch(masks):
        N = masks.shape[-1]
        n0 = min(_ceil(burn_in * N), N - 1)
        counts = masks[..., n0:].sum(axis=-1)
        return counts < theta * (N - n0)

    name = f"density({_fmt(theta)})" if burn_in == 0.1 else f"density({_fmt(theta)},burn_in={_fmt(burn_in)})"
    return FiniteIdealModel(name, SINGLE, {"theta": theta, "burn_in": burn_in}, batch)


def make_pringsheim(theta_p: float = 0.1) -> FiniteIdealModel:
    """Pringsheim ideal: small iff the set avoids the corner [b, M]^2."""
    theta_p = _check_fraction(theta_p, 0.0, 0.5, "theta_P")

    def batch(masks):
        M = masks.shape[-1]
        b = max(1, _ceil(theta_p * M))
        return ~masks[..., b - 1 :, b - 1 :].any(axis=(-2, -1))

    return FiniteIdealModel(f"pringsheim({_fmt(theta_p)})", DOUBLE, {"theta_P": theta_p}, batch)


def make_double_density(theta: float = 0.05, burn_in: float = 0.1) -> FiniteIdealModel:
    """Statistical (double density) ideal on the trailing corner window."""
    theta = _check_fraction(theta, 0.0, 1.0, "theta")
    burn_in = float(burn_in)
    if not (0.0 <= burn_in < 1.0):
        raise IdealSpecError(f"burn_in must lie in [0, 1), got {burn_in}")

    def batch(masks):
        M = masks.shape[-1]
        b = max(1, _ceil(burn_in * M))
        side = M - b + 1
        counts = masks[..., b - 1 :, b - 1 :].sum(axis=(-2, -1))
        return counts < theta * side * side

    return FiniteIdealModel(f"double-density({_fmt(theta)})", DOUBLE, {"theta": theta, "burn_in": burn_in}, batch)


def fubini_product(I: FiniteIdealModel, J: FiniteIdealModel) -> FiniteIdealModel:
    """Fubini product: rows with a J-large section must form an I-small set."""
    if I.arity != SINGLE or J.arity != SINGLE:
        raise IdealSpecError("Fubini product needs two single-arity models")

    def batch(masks):
        bad_rows = ~J.small(masks)
        return I.small(bad_rows)

    params = {f"I.{k}": v for k, v in I.params.items()}
    params.update({f"J.{k}": v for k, v in J.params.items()})
    return FiniteIdealModel(f"product({I.name},{J.name})", DOUBLE, params, batch)


def transpose(I: FiniteIdealModel) -> FiniteIdealModel:
    """Model whose small sets are the transposes of I-small sets."""
    if I.arity != DOUBLE:
        raise IdealSpecError("transpose needs a double-arity model")

    def batch(masks):
        return I.small(np.swapaxes(masks, -1, -2))

    return FiniteIdealModel(f"transpose({I.name})", DOUBLE, dict(I.params), batch)


def make_e_ideal() -> FiniteIdealModel:
    """The e-convergence ideal, transpose of Fin x Fin."""
    return transpose(fubini_product(make_fin(), make_fin()))


_ALIASES = {
    "z": "density(0.05)",
    "ip": "pringsheim(0.1)",
    "zp": "double-density(0.05)",
    "ie": "transpose(product(fin,fin))",
}


def parse_ideal(spec: str) -> FiniteIdealModel:
    """Build a model from a spec such as ``"transpose(product(fin,fin))"``.

    Recognized: ``fin``, ``density(theta)``, ``pringsheim(thetaP)``,
    ``double-density(theta)``, ``product(I,J)``, ``transpose(I)`` and the
    shorthands ``z``, ``ip``, ``zp``, ``ie``.
    """
    text = spec.strip()
    text = _ALIASES.get(text.lower(), text)
    text = text.replace("double-density", "double_density")
    try:
        node = ast.parse(text, mode="eval").body
    except SyntaxError as exc:
        raise IdealSpecError(f"cannot parse ideal spec {spec!r}") from exc
    return _build(node, spec)


def _build(node, spec: str) -> FiniteIdealModel:
    if isinstance(node, ast.Name):
        name, args, kwargs = node.id, [], {}
    elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        name = node.func.id
        args = node.args
        kwargs = {kw.arg: kw.value for kw in node.keywords}
    else:
        raise IdealSpecError(f"cannot parse ideal spec {spec!r}")
    name = name.lower()
    if name in ("z", "ip", "zp", "ie") and not args and not kwargs:
        return parse_ideal(name)
    if name in ("product", "transpose"):
        models = [_build(a, spec) for a in args]
        if name == "product":
            if len(models) != 2:
                raise IdealSpecError("product takes two ideals")
            return fubini_product(*models)
        if len(models) != 1:
            raise IdealSpecError("transpose takes one ideal")
        return transpose(models[0])
    try:
        values = [ast.literal_eval(a) for a in args]
        options = {k: ast.literal_eval(v) for k, v in kwargs.items()}
    except ValueError as exc:
        raise IdealSpecError(f"bad parameters in {spec!r}") from exc
    factories = {
        "fin": make_fin,
        "density": make_density_zero,
        "pringsheim": make_pringsheim,
        "double_density": make_double_density,
    }
    if name not in factories:
        raise IdealSpecError(f"unknown ideal {name!r}")
    try:
        return factories[name](*values, **options)
    except TypeError as exc:
        raise IdealSpecError(f"bad parameters in {spec!r}: {exc}") from exc
