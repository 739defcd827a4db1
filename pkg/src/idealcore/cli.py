"""
Command-line front end.

Subcommands: ``limits``, ``clusters``, ``core``, ``euler``, ``double`` and
``verify``.  Reports are deterministic JSON (sorted keys) with a ``params``
block echoing every effective setting; ``--format csv`` emits plot data.

Settings are resolved as built-in defaults, then ``IDEALCORE_*``
environment variables, then an optional ``--config`` JSON file, then
explicit flags.

Exit codes: 0 success, 1 a ``verify`` check failed, 2 configuration
error, 3 sequence not I-bounded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__, defaults
from .cluster import estimate_clusters
from .core import core_by_balls, core_by_cluster_hull, core_by_support, ball_characterization
from .corpus import CORPUS, corpus_item
from .geometry import hausdorff_distance
from .ideal import parse_ideal
from .invariants import verify_item
from .limits import UnboundedSequenceError, scalar_limits
from .sequence import SequenceWindow, catalog, generate, ingest_csv, parse_sequence_spec
from .transforms import DOUBLE_MODES, double_convergence, euler_core

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_UNBOUNDED = 3

MIN_SCALE = 16
DEFAULT_N = 10_000
DEFAULT_M = 256
SUBCOMMANDS = ("limits", "clusters", "core", "euler", "double", "verify")
METHODS = ("support", "cluster", "balls", "all")
ENV_PREFIX = "IDEALCORE_"


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


@dataclass
class RunConfig:
    """Every effective setting of one run; echoed as ``params``."""

    subcommand: str
    seq: Optional[str] = None
    ideal: Optional[str] = None
    scale: Optional[int] = None
    dim: int = 1
    delta: float = defaults.DELTA
    eps_final: float = defaults.EPS_FINAL
    tol: float = defaults.DELTA
    tol_equiv: Optional[float] = None
    bound: Optional[float] = defaults.BOUND
    directions: Optional[int] = None
    centers: int = defaults.BALL_CENTERS
    method: str = "support"
    r: Optional[float] = None
    mode: Optional[str] = None
    item: Optional[str] = None
    format: str = "json"
    out: Optional[str] = None

    def validate(self) -> None:
        for name in ("delta", "eps_final", "tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        if self.tol_equiv is not None and not (math.isfinite(self.tol_equiv) and self.tol_equiv > 0):
            raise ConfigError(f"tol_equiv must be a positive number, got {self.tol_equiv!r}")
        if self.bound is not None and not (math.isfinite(self.bound) and self.bound > 0):
            raise ConfigError(f"bound must be positive or 'none', got {self.bound!r}")
        if self.scale is not None and self.scale < MIN_SCALE:
            raise ConfigError(f"scale must be at least {MIN_SCALE}, got {self.scale}")
        if self.dim < 1:
            raise ConfigError("dim must be at least 1")
        if self.directions is not None and self.directions < 2:
            raise ConfigError("directions must be at least 2")
        if self.centers < 1:
            raise ConfigError("centers must be at least 1")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {list(METHODS)}")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.subcommand != "verify" and not self.seq:
            raise ConfigError("--seq is required")
        if self.subcommand in ("limits", "clusters", "core") and not self.ideal:
            raise ConfigError("--ideal is required")
        if self.subcommand == "euler" and self.r is None:
            raise ConfigError("--r is required")
        if self.subcommand == "double" and self.mode not in DOUBLE_MODES:
            raise ConfigError(f"--mode must be one of {sorted(DOUBLE_MODES)}")
        if self.subcommand == "verify":
            if not self.item:
                raise ConfigError("--item is required")
            if self.format != "json":
                raise ConfigError("verify reports are JSON only")

    @property
    def effective_tol_equiv(self) -> float:
        return defaults.tol_equiv(self.delta, self.eps_final) if self.tol_equiv is None else self.tol_equiv


_FLOAT_KEYS = ("delta", "eps_final", "tol", "tol_equiv", "bound", "r")
_INT_KEYS = ("scale", "dim", "directions", "centers")
# keys settable from the environment and from config files
_TUNABLE = _FLOAT_KEYS + _INT_KEYS + ("method", "mode", "format", "ideal", "seq", "item", "out")


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if isinstance(value, str) and value.strip().lower() in ("none", "null", "off"):
        if key in ("bound", "tol_equiv", "directions", "scale"):
            return None
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot read {value!r} as a number") from None
    return value


def _env_overrides(environ) -> dict:
    out = {}
    for key, raw in environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        name = key[len(ENV_PREFIX) :].lower()
        if name not in _TUNABLE:
            raise ConfigError(f"unknown environment setting {key}")
        out[name] = _coerce(name, raw)
    return out


def _file_overrides(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: expected a JSON object")
    unknown = sorted(set(data) - set(_TUNABLE))
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {unknown}")
    return {k: _coerce(k, v) for k, v in data.items()}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idealcore", description="Ideal cluster points and ideal cores at finite scale.")
    p.add_argument("--version", action="version", version=f"idealcore {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, *, needs_ideal=True):
        sp.add_argument("--seq", help="generator spec (e.g. 'alt', 'cycle([(0,0),(1,0)])') or CSV path")
        if needs_ideal:
            sp.add_argument("--ideal", help="ideal spec, e.g. fin, density(0.05), pringsheim(0.1)")
        sp.add_argument("--N", "--M", dest="scale", help="window scale (N single, M double)")
        sp.add_argument("--dim", help="coordinates per CSV row (default 1)")
        sp.add_argument("--delta", help="value-grid step of ideal limsups")
        sp.add_argument("--eps-final", dest="eps_final", help="final cell half-width")
        sp.add_argument("--tol", help="diameter tolerance for convergence verdicts")
        sp.add_argument("--tol-equiv", dest="tol_equiv", help="cross-construction tolerance (default 3*max(delta, eps_final))")
        sp.add_argument("--bound", help="I-boundedness cutoff, or 'none' to skip the check")
        sp.add_argument("--directions", help="support directions (default 64*k)")
        sp.add_argument("--centers", help="sampled ball centers")
        sp.add_argument("--format", choices=("json", "csv"), help="report format (csv = plot data)")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--config", help="JSON file of settings; unknown keys are rejected")

    common(sub.add_parser("limits", help="scalar ideal limsup and liminf"))
    common(sub.add_parser("clusters", help="ideal cluster candidates"))
    sp = sub.add_parser("core", help="ideal core by one or all constructions")
    common(sp)
    sp.add_argument("--method", choices=METHODS)
    sp = sub.add_parser("euler", help="Euler r-core (Knopp core of the Euler means)")
    common(sp, needs_ideal=False)
    sp.add_argument("--r", help="Euler parameter, |r| <= 4")
    sp = sub.add_parser("double", help="double-sequence convergence and core")
    common(sp, needs_ideal=False)
    sp.add_argument("--mode", choices=sorted(DOUBLE_MODES))
    sp = sub.add_parser("verify", help="invariant suite on a corpus item")
    sp.add_argument("--item", help=f"one of: {', '.join(i.name for i in CORPUS)}")
    for flag, dest in (("--delta", "delta"), ("--eps-final", "eps_final"), ("--tol-equiv", "tol_equiv"), ("--out", "out"), ("--config", "config")):
        sp.add_argument(flag, dest=dest)
    return p


def build_config(argv: Sequence[str], environ=None) -> RunConfig:
    """Parse argv plus overrides into a validated :class:`RunConfig`."""
    ns = _parser().parse_args(list(argv))
    values: dict[str, Any] = {}
    values.update(_env_overrides(os.environ if environ is None else environ))
    config = getattr(ns, "config", None)
    if config:
        values.update(_file_overrides(config))
    for key, raw in vars(ns).items():
        if key in ("subcommand", "config") or raw is None:
            continue
        values[key] = _coerce(key, raw)
    cfg = RunConfig(subcommand=ns.subcommand, **values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------- loading


def _load_window(cfg: RunConfig) -> SequenceWindow:
    path = Path(cfg.seq)
    if path.suffix.lower() == ".csv" or path.is_file():
        if not path.is_file():
            raise ConfigError(f"no such file: {cfg.seq}")
        x = ingest_csv(path, cfg.dim)
        if cfg.scale is not None and cfg.scale != x.scale:
            raise ConfigError(f"{cfg.seq} has scale {x.scale}, but --N/--M says {cfg.scale}")
        if x.scale < MIN_SCALE:
            raise ConfigError(f"scale must be at least {MIN_SCALE}, got {x.scale}")
        cfg.scale = x.scale
        return x
    spec = parse_sequence_spec(cfg.seq)
    if cfg.scale is None:
        cfg.scale = DEFAULT_M if catalog().get(spec.name) == "double" else DEFAULT_N
    return generate(spec, cfg.scale)


def _params(cfg: RunConfig, x: Optional[SequenceWindow] = None, **extra) -> dict:
    d = asdict(cfg)
    d.pop("out")
    d["tol_equiv"] = cfg.effective_tol_equiv
    if cfg.subcommand != "core":
        d.pop("method")
    if cfg.subcommand != "euler":
        d.pop("r")
    if cfg.subcommand != "double":
        d.pop("mode")
    if cfg.subcommand != "verify":
        d.pop("item")
    if x is not None:
        d["dim"] = x.dim
        d["arity"] = x.arity
        d["source"] = x.source
    if d.get("directions") is None and x is not None:
        d["directions"] = defaults.DIRECTIONS_PER_DIM * x.dim if x.dim > 1 else 2
    d.update(extra)
    return d


# ---------------------------------------------------------------- subcommands


def _cmd_limits(cfg: RunConfig):
    x = _load_window(cfg)
    if x.dim != 1:
        raise ConfigError("limits needs a real-valued sequence (dim 1)")
    I = parse_ideal(cfg.ideal)
    rep = scalar_limits(x, I, cfg.delta, bound=cfg.bound)
    report = dict(rep.as_dict(), model=I.name, params=_params(cfg, x))
    rows = [["ilimsup", "iliminf", "delta", "N"], [rep.ilimsup, rep.iliminf, rep.delta, rep.scale]]
    return report, rows


def _cmd_clusters(cfg: RunConfig):
    x = _load_window(cfg)
    I = parse_ideal(cfg.ideal)
    C = estimate_clusters(x, I, cfg.eps_final, bound=cfg.bound)
    report = dict(C.as_dict(), count=len(C), params=_params(cfg, x))
    report["box"] = None if C.box is None else {"lo": list(C.box[0]), "hi": list(C.box[1])}
    header = [f"x{i + 1}" for i in range(x.dim)] + ["radius"]
    rows = [header] + [list(p) + [C.radius] for p in C.points.tolist()]
    return report, rows


def _core_reports(cfg: RunConfig, x, I) -> dict:
    out = {}
    if cfg.method in ("support", "all"):
        out["support"] = core_by_support(x, I, cfg.directions, cfg.delta, bound=cfg.bound)
    if cfg.method in ("cluster", "all"):
        out["cluster"] = core_by_cluster_hull(x, I, cfg.eps_final, bound=cfg.bound)
    if cfg.method in ("balls", "all"):
        B = ball_characterization(x, I, cfg.centers, cfg.delta, bound=cfg.bound, directions=cfg.directions)
        out["balls"] = core_by_balls(x, I, cfg.centers, cfg.delta, cfg.directions, bound=cfg.bound, balls=B)
    return out


def _cross_check(reports: dict, tol: float) -> dict:
    names = sorted(reports)
    pairs = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            P, Q = reports[a].result, reports[b].result
            if P.is_empty or Q.is_empty:
                h = 0.0 if P.is_empty and Q.is_empty else None
            else:
                h = hausdorff_distance(P, Q)
            pairs[f"{a}~{b}"] = {"hausdorff": h, "within": h is not None and h <= tol}
    diam = [r.diameter for r in reports.values() if not r.result.is_empty]
    spread = (max(diam) - min(diam)) if len(diam) == len(reports) and diam else None
    return {
        "tol_equiv": tol,
        "pairs": pairs,
        "diameter_spread": spread,
        "agree": all(p["within"] for p in pairs.values()),
    }


def _polytope_rows(reports: dict, dim: int) -> list:
    rows = [["construction"] + [f"x{i + 1}" for i in range(dim)]]
    for name in sorted(reports):
        d = reports[name].as_dict()
        for v in d.get("vertices", []):
            rows.append([name] + v)
    return rows


def _cmd_core(cfg: RunConfig):
    x = _load_window(cfg)
    I = parse_ideal(cfg.ideal)
    reports = _core_reports(cfg, x, I)
    report: dict[str, Any] = {
        "model": I.name,
        "constructions": {k: v.as_dict() for k, v in reports.items()},
        "params": _params(cfg, x),
    }
    if len(reports) > 1:
        report["cross_check"] = _cross_check(reports, cfg.effective_tol_equiv)
    return report, _polytope_rows(reports, x.dim)


def _cmd_euler(cfg: RunConfig):
    x = _load_window(cfg)
    rep = euler_core(x, cfg.r, cfg.delta, cfg.directions, bound=cfg.bound)
    report = {"core": rep.as_dict(), "params": _params(cfg, x)}
    return report, _polytope_rows({"euler": rep}, x.dim)


def _cmd_double(cfg: RunConfig):
    x = _load_window(cfg)
    if x.arity != "double":
        raise ConfigError("double needs a double sequence (a double_* generator or n,m,v CSV)")
    res = double_convergence(x, cfg.mode, cfg.tol, cfg.delta, cfg.directions, bound=cfg.bound)
    report = {
        "mode": res.mode,
        "model": res.model,
        "converges": res.converges,
        "limit": None if res.limit is None else res.limit.tolist(),
        "core": res.report.as_dict(),
        "params": _params(cfg, x),
    }
    return report, _polytope_rows({res.mode: res.report}, x.dim)


def _cmd_verify(cfg: RunConfig):
    try:
        item = corpus_item(cfg.item)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    res = verify_item(item, cfg.delta, cfg.eps_final, cfg.effective_tol_equiv)
    params = {
        "subcommand": "verify",
        "item": item.name,
        "delta": cfg.delta,
        "eps_final": cfg.eps_final,
        "tol_equiv": cfg.effective_tol_equiv,
        "bound": defaults.BOUND,
        "centers": defaults.BALL_CENTERS,
        "directions": defaults.DIRECTIONS_PER_DIM * item.dim if item.dim > 1 else 2,
    }
    return dict(res, params=params), None


_COMMANDS = {
    "limits": _cmd_limits,
    "clusters": _cmd_clusters,
    "core": _cmd_core,
    "euler": _cmd_euler,
    "double": _cmd_double,
    "verify": _cmd_verify,
}


# ---------------------------------------------------------------- output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def render_json(report: dict) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def run(argv: Optional[Sequence[str]] = None, environ=None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = build_config(argv, environ)
        report, rows = _COMMANDS[cfg.subcommand](cfg)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    except UnboundedSequenceError as exc:
        print(f"idealcore: unbounded sequence: {exc}", file=stderr)
        return EXIT_UNBOUNDED
    except (ValueError, OverflowError) as exc:
        print(f"idealcore: config error: {exc}", file=stderr)
        return EXIT_CONFIG
    text = render_csv(rows) if cfg.format == "csv" else render_json(report)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            print(f"idealcore: config error: cannot write {cfg.out}: {exc.strerror}", file=stderr)
            return EXIT_CONFIG
    else:
        stdout.write(text)
    if cfg.subcommand == "verify" and not report["pass"]:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
