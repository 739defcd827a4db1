"""
Finite windows of single and double sequences in R^k.

Windows are 1-based: ``values[n - 1]`` holds x_n and, for a double window,
``values[n - 1, m - 1]`` holds x_{n,m}.
"""

from __future__ import annotations

import ast
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

__all__ = [
    "CSVFormatError",
    "GeneratorSpec",
    "SequenceSpecError",
    "SequenceWindow",
    "catalog",
    "export_csv",
    "generate",
    "ingest_csv",
    "parse_sequence_spec",
]


class SequenceSpecError(ValueError):
    """Unknown generator or invalid generator parameters."""


class CSVFormatError(ValueError):
    """Malformed sequence file; the message names the offending line."""


@dataclass(frozen=True)
class SequenceWindow:
    """First N terms (or the [1, M]^2 block) of a sequence in R^k."""

    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim not in (2, 3):
            raise ValueError("values must have shape (N, k) or (M, M, k)")
        if v.ndim == 3 and v.shape[0] != v.shape[1]:
            raise ValueError("double windows must be square")
        if v.shape[0] < 1 or v.shape[-1] < 1:
            raise ValueError("window must be nonempty")
        if not np.all(np.isfinite(v)):
            raise ValueError("window values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def arity(self) -> str:
        return "single" if self.values.ndim == 2 else "double"

    @property
    def dim(self) -> int:
        return self.values.shape[-1]

    @property
    def scale(self) -> int:
        return self.values.shape[0]

    @property
    def index_shape(self) -> tuple[int, ...]:
        return self.values.shape[:-1]

    @property
    def flat(self) -> np.ndarray:
        """All points as an array of shape (count, k), row-major."""
        return self.values.reshape(-1, self.dim)

    def __len__(self) -> int:
        return int(np.prod(self.index_shape))

    def indices(self) -> np.ndarray:
        """1-based indices, shape (N,) or (M*M, 2) in row-major order."""
        if self.arity == "single":
            return np.arange(1, self.scale + 1)
        n, m = np.meshgrid(np.arange(1, self.scale + 1), np.arange(1, self.scale + 1), indexing="ij")
        return np.column_stack([n.ravel(), m.ravel()])

    def with_values(self, values, source: Optional[str] = None) -> "SequenceWindow":
        return SequenceWindow(np.asarray(values, dtype=float).reshape(self.values.shape[:-1] + (-1,)), source or self.source)


@dataclass(frozen=True)
class GeneratorSpec:
    """A catalog generator name with its parameters."""

    name: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __str__(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v!r}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"


_SPARSE_SETS = ("squares", "cubes", "powers2")


def _is_square(n: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(n.astype(float)) + 0.5).astype(np.int64)
    return r * r == n


def _sparse_mask(n: np.ndarray, which: str) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    if which == "squares":
        return _is_square(n)
    if which == "cubes":
        r = np.floor(np.cbrt(n.astype(float)) + 0.5).astype(np.int64)
        return r * r * r == n
    if which == "powers2":
        return (n & (n - 1)) == 0
    raise SequenceSpecError(f"unknown sparse set {which!r}; choose from {sorted(_SPARSE_SETS)}")


def _points_param(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2 or len(P) == 0:
        raise SequenceSpecError("points must be a nonempty list of equal-length tuples")
    return P


def _value_param(value) -> np.ndarray:
    v = np.atleast_1d(np.asarray(value, dtype=float))
    if v.ndim != 1:
        raise SequenceSpecError("value must be a scalar or a flat tuple")
    return v


# single generators: n is the int array 1..N, result has shape (N, k)

def _alt(n, **_):
    return ((-1.0) ** n)[:, None]


def _alt_decay(n, **_):
    return ((-1.0) ** n + 1.0 / n)[:, None]


def _alt_linear(n, **_):
    return ((-1.0) ** n * n)[:, None]


def _sparse_spike(n, set="squares", height=1.0, **_):
    return np.where(_sparse_mask(n, set), float(height), 0.0)[:, None]


def _cycle(n, points=((0.0,), (1.0,)), **_):
    P = _points_param(points)
    return P[(n - 1) % len(P)]


def _constant(n, value=0.0, **_):
    v = _value_param(value)
    return np.broadcast_to(v, (len(n), v.size)).copy()


def _uniform(n, low=-1.0, high=1.0, dim=1, seed=0, **_):
    if not high > low:
        raise SequenceSpecError("uniform needs low < high")
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=(len(n), int(dim)))


def _rotation(n, turn=(math.sqrt(5.0) - 1.0) / 2.0, **_):
    ang = 2.0 * math.pi * ((n * float(turn)) % 1.0)
    return np.column_stack([np.cos(ang), np.sin(ang)])


# double generators: n, m are (M, M) int arrays, result (M, M, k)

def _double_alt(n, m, **_):
    return ((-1.0) ** (n + m))[..., None]


def _double_alt_rows(n, m, **_):
    return ((-1.0) ** n + 0.0 * m)[..., None]


def _double_harmonic(n, m, **_):
    return (1.0 / (n + m))[..., None]


def _double_constant(n, m, value=0.0, **_):
    v = _value_param(value)
    return np.broadcast_to(v, n.shape + (v.size,)).copy()


def _double_cycle(n, m, points=((0.0,), (1.0,)), **_):
    P = _points_param(points)
    return P[(n + m) % len(P)]


_SINGLE = {
    "alt": _alt,
    "alt_decay": _alt_decay,
    "alt_linear": _alt_linear,
    "sparse_spike": _sparse_spike,
    "cycle": _cycle,
    "constant": _constant,
    "uniform": _uniform,
    "rotation": _rotation,
}
_DOUBLE = {
    "double_alt": _double_alt,
    "double_alt_rows": _double_alt_rows,
    "double_harmonic": _double_harmonic,
    "double_constant": _double_constant,
    "double_cycle": _double_cycle,
}
_NOISE_KEYS = {"noise", "noise_mode", "seed"}
_ALLOWED = {
    "alt": set(),
    "alt_decay": set(),
    "alt_linear": set(),
    "sparse_spike": {"set", "height"},
    "cycle": {"points"},
    "constant": {"value"},
    "uniform": {"low", "high", "dim"},
    "rotation": {"turn"},
    "double_alt": set(),
    "double_alt_rows": set(),
    "double_harmonic": set(),
    "double_constant": {"value"},
    "double_cycle": {"points"},
}
_POSITIONAL = {"sparse_spike": "set", "cycle": "points", "constant": "value", "double_constant": "value", "double_cycle": "points", "rotation": "turn"}


def catalog() -> dict[str, str]:
    """Generator names mapped to their arity."""
    out = {k: "single" for k in _SINGLE}
    out.update({k: "double" for k in _DOUBLE})
    return out


def parse_sequence_spec(text: str) -> GeneratorSpec:
    """Parse ``"name"`` or ``"name(arg, key=value, ...)"`` into a spec.

    >>> parse_sequence_spec("sparse_spike(squares, noise=0.1)")
    GeneratorSpec(name='sparse_spike', params={'set': 'squares', 'noise': 0.1})
    """
    try:
        node = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise SequenceSpecError(f"cannot parse sequence spec {text!r}") from exc
    if isinstance(node, ast.Name):
        return GeneratorSpec(node.id, {})
    if not (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)):
        raise SequenceSpecError(f"cannot parse sequence spec {text!r}")
    name = node.func.id
    params: dict[str, Any] = {}
    if node.args:
        if len(node.args) > 1 or name not in _POSITIONAL:
            raise SequenceSpecError(f"{name} takes keyword arguments")
        arg = node.args[0]
        params[_POSITIONAL[name]] = arg.id if isinstance(arg, ast.Name) else ast.literal_eval(arg)
    for kw in node.keywords:
        v = kw.value
        params[kw.arg] = v.id if isinstance(v, ast.Name) else ast.literal_eval(v)
    return GeneratorSpec(name, params)


def _validate(spec: GeneratorSpec) -> None:
    if spec.name not in _ALLOWED:
        raise SequenceSpecError(f"unknown generator {spec.name!r}; known: {sorted(_ALLOWED)}")
    extra = set(spec.params) - _ALLOWED[spec.name] - _NOISE_KEYS
    if extra:
        raise SequenceSpecError(f"{spec.name} does not take {sorted(extra)}")
    noise = float(spec.params.get("noise", 0.0))
    if noise < 0 or not math.isfinite(noise):
        raise SequenceSpecError("noise amplitude must be finite and >= 0")
    mode = spec.params.get("noise_mode", "decay")
    if mode not in ("decay", "sparse"):
        raise SequenceSpecError("noise_mode must be 'decay' or 'sparse'")


def generate(spec, scale: int) -> SequenceWindow:
    """Deterministic window of a catalog generator.

    ``scale`` is N for single generators and M (window [1, M]^2) for the
    ``double_*`` ones.  Noise options accepted by every generator:
    ``noise`` (amplitude), ``noise_mode`` (``"decay"`` adds uniform noise
    scaled by 1/sqrt(n); ``"sparse"`` adds full-amplitude noise on perfect
    square indices only) and ``seed``.
    """
    if isinstance(spec, str):
        spec = parse_sequence_spec(spec)
    scale = int(scale)
    if scale < 1:
        raise SequenceSpecError("scale must be at least 1")
    _validate(spec)
    params = {k: v for k, v in spec.params.items() if k not in _NOISE_KEYS}
    if spec.name == "uniform":
        params["seed"] = spec.params.get("seed", 0)
    if spec.name in _SINGLE:
        n = np.arange(1, scale + 1, dtype=np.int64)
        values = np.asarray(_SINGLE[spec.name](n, **params), dtype=float)
        decay = 1.0 / np.sqrt(n)
        sparse = _is_square(n)
    else:
        n, m = np.meshgrid(np.arange(1, scale + 1), np.arange(1, scale + 1), indexing="ij")
        values = np.asarray(_DOUBLE[spec.name](n, m, **params), dtype=float)
        decay = 1.0 / np.sqrt(np.minimum(n, m))
        sparse = n == m
    noise = float(spec.params.get("noise", 0.0))
    if noise > 0:
        # offset keeps the noise stream apart from the uniform generator's
        rng = np.random.default_rng([int(spec.params.get("seed", 0)), 1])
        eps = rng.uniform(-noise, noise, size=values.shape)
        if spec.params.get("noise_mode", "decay") == "decay":
            values = values + eps * decay[..., None]
        else:
            values = values + eps * sparse[..., None]
    return SequenceWindow(values, source=str(spec))


def ingest_csv(path, dim: int) -> SequenceWindow:
    """Read a window from CSV.

    Rows of ``dim`` numbers give a single sequence; rows ``n,m,v1..vk`` give
    a double sequence, which must cover [1, M]^2 exactly once.
    """
    path = Path(path)
    dim = int(dim)
    rows: list[list[float]] = []
    width = None
    with path.open(newline="") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            if not raw or all(not c.strip() for c in raw) or raw[0].lstrip().startswith("#"):
                continue
            if width is None:
                width = len(raw)
                if width not in (dim, dim + 2):
                    raise CSVFormatError(f"line {lineno}: expected {dim} or {dim + 2} fields, got {width}")
            elif len(raw) != width:
                raise CSVFormatError(f"line {lineno}: expected {width} fields, got {len(raw)}")
            try:
                vals = [float(c) for c in raw]
            except ValueError as exc:
                raise CSVFormatError(f"line {lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in vals):
                raise CSVFormatError(f"line {lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise CSVFormatError(f"{path}: no data rows")
    data = np.array(rows)
    if width == dim:
        return SequenceWindow(data, source=str(path))
    idx = data[:, :2]
    if np.any(idx != np.round(idx)) or np.any(idx < 1):
        raise CSVFormatError(f"{path}: indices must be positive integers")
    idx = idx.astype(int)
    M = int(round(math.sqrt(len(idx))))
    if M * M != len(idx) or idx.max() > M:
        raise CSVFormatError(f"{path}: incomplete double window ({len(idx)} rows)")
    values = np.full((M, M, dim), np.nan)
    seen = np.zeros((M, M), dtype=bool)
    for (n, m), v in zip(idx, data[:, 2:]):
        if seen[n - 1, m - 1]:
            raise CSVFormatError(f"{path}: duplicate index ({n},{m})")
        seen[n - 1, m - 1] = True
        values[n - 1, m - 1] = v
    if not seen.all():
        raise CSVFormatError(f"{path}: incomplete double window")
    return SequenceWindow(values, source=str(path))


def export_csv(window: SequenceWindow, path) -> Path:
    """Write a window in the format read by :func:`ingest_csv`; exact float round-trip."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        if window.arity == "single":
            for row in window.flat:
                writer.writerow([repr(float(v)) for v in row])
        else:
            for (n, m), row in zip(window.indices(), window.flat):
                writer.writerow([int(n), int(m)] + [repr(float(v)) for v in row])
    return path
