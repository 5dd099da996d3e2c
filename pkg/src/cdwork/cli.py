"""Command-line front end.

Four subcommands emit CSV data files:

* ``lz-dist``     work distribution of the controlled two-level drive
* ``entropy-map`` work-distribution entropy over (quench duration, time)
* ``kz-scaling``  impulse-width scaling fit across quench durations
* ``compare``     full-vs-restricted control entropies for many-body models

Configuration comes from built-in per-command defaults, overridden by an
optional JSON config document (``--config``), overridden by command-line
flags.  ``CDWORK_WORKERS`` overrides the worker count from any source.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis
from .control import DegeneracyPolicy, FullCD, RestrictedCD
from .errors import CdworkError
from .models import LZ, IsingChain, LMG, RampProfile
from .workstats import tpm_distribution

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_KZ_TARGET_EXPONENT = 2.0 / 3.0
_KZ_EXPONENT_BAND = 0.07


class ConfigError(Exception):
    """Invalid configuration; the message names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


_FIG1 = {"model": "lz", "delta": 0.5, "length": None, "ramp": "linear",
         "g0": -10.0, "gd": 20.0}
_FIG2 = {"model": "ising", "delta": None, "length": 5, "ramp": "sine",
         "g0": 2.0, "gd": -1.2}
_COMMON = {"grid_points": 200, "merge_tol": None, "gap_tol": 1e-9,
           "coupling_tol": 1e-9, "workers": None}

DEFAULTS: dict[str, dict] = {
    "lz-dist": {**_FIG1, **_COMMON, "tau_q": 1.0, "scheme": "full",
                "out": "lz_dist.csv"},
    "entropy-map": {**_FIG1, **_COMMON, "scheme": "full", "alpha": 1.0,
                    "kz_lines": False,
                    "tau_q_grid": {"start": 0.1, "stop": 10.0, "count": 25,
                                   "spacing": "log"},
                    "out": "entropy_map.csv"},
    "kz-scaling": {**_FIG1, **_COMMON, "exit_flank": False,
                   "tau_q_grid": {"start": 10.0, "stop": 1.0e4, "count": 16,
                                  "spacing": "log"},
                   "out": "kz_scaling.csv"},
    "compare": {**_FIG2, **_COMMON, "tau_q": 1.0, "sweep_axis": None,
                "tau_q_grid": {"start": 0.05, "stop": 5.0, "count": 11,
                               "spacing": "log"},
                "length_grid": [4, 8, 16, 32],
                "out": "compare.csv"},
}

_FLAG_KEYS = ["model", "delta", "length", "ramp", "g0", "gd", "tau_q",
              "tau_q_grid", "length_grid", "grid_points", "merge_tol",
              "gap_tol", "coupling_tol", "alpha", "workers", "out",
              "kz_lines", "scheme", "sweep_axis", "exit_flank"]


def _fmt(x) -> str:
    """Shortest decimal within 12 significant digits."""
    return f"{float(x):.12g}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdwork",
        description="Work statistics of counterdiabatically controlled drives",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=str, default=None,
                       help="JSON config document; flags override its fields")
        p.add_argument("--model", choices=["lz", "ising", "lmg"], default=None)
        p.add_argument("--delta", type=float, default=None,
                       help="minimal gap of the two-level model")
        p.add_argument("--length", type=int, default=None,
                       help="number of spins (ising, lmg)")
        p.add_argument("--ramp", choices=["linear", "sine"], default=None)
        p.add_argument("--g0", type=float, default=None, help="field offset")
        p.add_argument("--gd", type=float, default=None, help="field amplitude")
        p.add_argument("--grid-points", type=int, default=None)
        p.add_argument("--merge-tol", type=float, default=None,
                       help="work merge tolerance (default: 1e-9 x spectral range)")
        p.add_argument("--gap-tol", type=float, default=None)
        p.add_argument("--coupling-tol", type=float, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", type=str, default=None, help="output CSV path")

    p_dist = sub.add_parser("lz-dist", help="two-level work distribution over time")
    add_common(p_dist)
    p_dist.add_argument("--tau-q", type=float, default=None)
    p_dist.add_argument("--scheme", choices=["full", "restricted"], default=None)

    p_map = sub.add_parser("entropy-map", help="entropy over (tau_q, t)")
    add_common(p_map)
    p_map.add_argument("--tau-q-grid", type=str, default=None,
                       help="'start:stop:count[:log|lin]' or comma list")
    p_map.add_argument("--scheme", choices=["full", "restricted"], default=None)
    p_map.add_argument("--alpha", type=float, default=None,
                       help="adiabatic-impulse matching constant")
    p_map.add_argument("--kz-lines", action="store_true", default=None,
                       help="append analytic crossover-time columns")

    p_kz = sub.add_parser("kz-scaling", help="impulse-width scaling fit")
    add_common(p_kz)
    p_kz.add_argument("--tau-q-grid", type=str, default=None,
                      help="'start:stop:count[:log]' or comma list (log-spaced)")
    p_kz.add_argument("--exit-flank", action="store_true", default=None,
                      help="measure the crossover on the exit flank instead")

    p_cmp = sub.add_parser("compare", help="full vs restricted control entropies")
    add_common(p_cmp)
    p_cmp.add_argument("--tau-q", type=float, default=None,
                       help="fixed quench duration for the length sweep")
    p_cmp.add_argument("--tau-q-grid", type=str, default=None)
    p_cmp.add_argument("--length-grid", type=str, default=None,
                       help="comma list of system sizes")
    p_cmp.add_argument("--sweep-axis", choices=["tau-q", "length"], default=None)
    return parser


def _parse_grid_flag(text: str, field: str) -> list[float] | dict:
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(field, "expected 'start:stop:count[:log|lin]'")
        spacing = parts[3] if len(parts) == 4 else "log"
        if spacing not in ("log", "lin"):
            raise ConfigError(field, f"unknown spacing {spacing!r}")
        try:
            return {"start": float(parts[0]), "stop": float(parts[1]),
                    "count": int(parts[2]), "spacing": spacing}
        except ValueError as exc:
            raise ConfigError(field, str(exc)) from exc
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(field, str(exc)) from exc


def _expand_grid(spec, field: str) -> list[float]:
    if isinstance(spec, dict):
        try:
            start, stop = float(spec["start"]), float(spec["stop"])
            count = int(spec["count"])
            spacing = spec.get("spacing", "log")
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(field, f"bad grid specification: {exc}") from exc
        if count < 1:
            raise ConfigError(field, "count must be at least 1")
        if spacing == "log":
            if start <= 0.0 or stop <= 0.0:
                raise ConfigError(field, "log spacing needs positive bounds")
            return list(np.geomspace(start, stop, count))
        if spacing == "lin":
            return list(np.linspace(start, stop, count))
        raise ConfigError(field, f"unknown spacing {spacing!r}")
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    raise ConfigError(field, "expected a list or a start/stop/count object")


def _load_config_file(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError("config", "config document must be a JSON object")
    known = set(_FLAG_KEYS) | {"command"}
    for key in document:
        if key not in known:
            raise ConfigError(key, "unknown configuration field")
    declared = document.get("command")
    if declared is not None and declared != command:
        raise ConfigError("command",
                          f"config targets {declared!r} but {command!r} was invoked")
    document.pop("command", None)
    return document


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        cfg.update(_load_config_file(args.config, args.command))
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            if key in ("tau_q_grid",) and isinstance(value, str):
                value = _parse_grid_flag(value, "tau_q_grid")
            if key == "length_grid" and isinstance(value, str):
                value = _parse_grid_flag(value, "length_grid")
            if key == "sweep_axis" and isinstance(value, str):
                value = value.replace("-", "_")
            cfg[key] = value
    cfg["command"] = args.command
    _validate(cfg)
    return cfg


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise ConfigError(field, message)


def _validate(cfg: dict) -> None:
    command = cfg["command"]
    _require(cfg["model"] in ("lz", "ising", "lmg"), "model",
             f"unknown model {cfg['model']!r}")
    if command == "lz-dist":
        _require(cfg["model"] == "lz", "model", "lz-dist requires the lz model")
    if command == "kz-scaling":
        _require(cfg["model"] == "lz", "model", "kz-scaling requires the lz model")
        _require(cfg["ramp"] == "linear", "ramp", "kz-scaling requires a linear ramp")
    if command == "compare":
        _require(cfg["model"] in ("ising", "lmg"), "model",
                 "compare requires the ising or lmg model")
    if cfg["model"] == "lz":
        _require(cfg["delta"] is not None and cfg["delta"] >= 0.0, "delta",
                 "delta must be a non-negative real")
    else:
        minimum = 3 if cfg["model"] == "ising" else 2
        _require(cfg["length"] is not None and cfg["length"] >= minimum, "length",
                 f"length must be an integer >= {minimum}")
    _require(cfg["ramp"] in ("linear", "sine"), "ramp",
             f"unknown ramp kind {cfg['ramp']!r}")
    if "tau_q" in cfg and command in ("lz-dist", "compare"):
        _require(cfg["tau_q"] is not None and cfg["tau_q"] > 0.0, "tau_q",
                 "tau_q must be positive")
    minimum_grid = 2 if command == "lz-dist" else 100
    _require(isinstance(cfg["grid_points"], int) and cfg["grid_points"] >= minimum_grid,
             "grid_points", f"grid_points must be an integer >= {minimum_grid}")
    if cfg["merge_tol"] is not None:
        _require(cfg["merge_tol"] > 0.0, "merge_tol", "merge_tol must be positive")
    _require(cfg["gap_tol"] > 0.0, "gap_tol", "gap_tol must be positive")
    _require(cfg["coupling_tol"] > 0.0, "coupling_tol",
             "coupling_tol must be positive")
    if cfg["workers"] is not None:
        _require(isinstance(cfg["workers"], int) and cfg["workers"] >= 1, "workers",
                 "workers must be a positive integer")
    _require(bool(cfg["out"]), "out", "output path must be non-empty")

    if command in ("entropy-map", "kz-scaling"):
        taus = _expand_grid(cfg["tau_q_grid"], "tau_q_grid")
        _require(len(taus) >= 1, "tau_q_grid", "grid must be non-empty")
        _require(all(t > 0.0 for t in taus), "tau_q_grid",
                 "every tau_q must be positive")
        _require(all(b > a for a, b in zip(taus, taus[1:])), "tau_q_grid",
                 "grid must increase strictly")
        cfg["tau_q_values"] = taus
    if command == "kz-scaling":
        taus = cfg["tau_q_values"]
        _require(len(taus) >= 5, "tau_q_grid", "scaling fit needs at least 5 values")
        ratios = [b / a for a, b in zip(taus, taus[1:])]
        _require(max(ratios) - min(ratios) <= 1e-6 * max(ratios), "tau_q_grid",
                 "scaling grid must be log-spaced")
        _require(0.0 <= -cfg["g0"] / cfg["gd"] <= 1.0 if cfg["gd"] != 0.0 else False,
                 "g0", "ramp must cross g = 0 inside the window")
    if command == "entropy-map" and cfg["kz_lines"]:
        _require(cfg["model"] == "lz", "kz_lines", "crossover lines need the lz model")
        _require(cfg["ramp"] == "linear", "kz_lines",
                 "crossover lines need a linear ramp")
        _require(cfg["gd"] != 0.0 and 0.0 <= -cfg["g0"] / cfg["gd"] <= 1.0, "kz_lines",
                 "ramp must cross g = 0 inside the window")
        _require(cfg["alpha"] > 0.0, "alpha", "alpha must be positive")
    if command == "compare":
        axis = cfg["sweep_axis"]
        if axis is None:
            axis = "tau_q" if cfg["model"] == "ising" else "length"
            cfg["sweep_axis"] = axis
        _require(axis in ("tau_q", "length"), "sweep_axis",
                 f"unknown sweep axis {axis!r}")
        _require((cfg["model"], axis) in (("ising", "tau_q"), ("lmg", "length")),
                 "sweep_axis",
                 "the ising comparison sweeps tau_q; the lmg comparison sweeps length")
        if axis == "tau_q":
            taus = _expand_grid(cfg["tau_q_grid"], "tau_q_grid")
            _require(len(taus) >= 1 and all(t > 0.0 for t in taus), "tau_q_grid",
                     "every tau_q must be positive")
            cfg["sweep_values"] = taus
        else:
            lengths = _expand_grid(cfg["length_grid"], "length_grid")
            _require(all(float(v).is_integer() and v >= 2 for v in lengths),
                     "length_grid", "lengths must be integers >= 2")
            cfg["sweep_values"] = [int(v) for v in lengths]


def _resolve_workers(cfg: dict) -> int:
    env = os.environ.get("CDWORK_WORKERS")
    if env is not None:
        try:
            workers = int(env)
        except ValueError as exc:
            raise ConfigError("CDWORK_WORKERS", f"not an integer: {env!r}") from exc
        if workers < 1:
            raise ConfigError("CDWORK_WORKERS", "must be a positive integer")
        return workers
    if cfg["workers"] is not None:
        return cfg["workers"]
    return min(os.cpu_count() or 1, 8)


def _model_spec(cfg: dict):
    if cfg["model"] == "lz":
        return LZ(cfg["delta"])
    if cfg["model"] == "ising":
        return IsingChain(cfg["length"])
    return LMG(cfg["length"])


def _policy(cfg: dict) -> DegeneracyPolicy:
    return DegeneracyPolicy(cfg["gap_tol"], cfg["coupling_tol"])


def _scheme(cfg: dict):
    return FullCD() if cfg.get("scheme", "full") == "full" else RestrictedCD(0)


def _write_csv(path: str, header: list[str], rows) -> None:
    """Write atomically: a partial file never lands at the destination."""
    target = Path(path)
    if target.parent != Path("") and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    temp = target.with_name(target.name + ".tmp")
    try:
        with open(temp, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(temp, target)
    except BaseException:
        temp.unlink(missing_ok=True)
        raise


def cmd_lz_dist(cfg: dict) -> None:
    model = _model_spec(cfg)
    ramp = RampProfile(cfg["ramp"], cfg["g0"], cfg["gd"], cfg["tau_q"])
    scheme = _scheme(cfg)
    policy = _policy(cfg)
    rows = []
    for t in np.linspace(0.0, ramp.tau_q, cfg["grid_points"]):
        dist = tpm_distribution(model, ramp, scheme, float(t), policy, cfg["merge_tol"])
        for w, p in zip(dist.works, dist.probabilities):
            rows.append((_fmt(t), _fmt(w), _fmt(p)))
    _write_csv(cfg["out"], ["t", "W", "p"], rows)


def _entropy_map_cell(args) -> list[tuple[float, float]]:
    model, kind, g0, gd, tau_q, scheme, grid_points, policy, merge_tol = args
    ramp = RampProfile(kind, g0, gd, tau_q)
    trace = analysis.entropy_trace(model, ramp, scheme, grid_points, policy, merge_tol)
    return list(zip(trace.times.tolist(), trace.entropies.tolist()))


def cmd_entropy_map(cfg: dict) -> None:
    model = _model_spec(cfg)
    scheme = _scheme(cfg)
    policy = _policy(cfg)
    taus = cfg["tau_q_values"]
    jobs = [(model, cfg["ramp"], cfg["g0"], cfg["gd"], tau, scheme,
             cfg["grid_points"], policy, cfg["merge_tol"]) for tau in taus]
    workers = _resolve_workers(cfg)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_entropy_map_cell, jobs))
    else:
        blocks = [_entropy_map_cell(job) for job in jobs]
    kz_lines = bool(cfg.get("kz_lines"))
    header = ["tau_q", "t", "h_w"] + (["t_hat_minus", "t_hat_plus"] if kz_lines else [])
    rows = []
    for tau, block in zip(taus, blocks):
        extras: tuple = ()
        if kz_lines:
            ramp = RampProfile(cfg["ramp"], cfg["g0"], cfg["gd"], tau)
            t_minus, t_plus = analysis.adiabatic_impulse_times(
                cfg["delta"], ramp, cfg["alpha"])
            extras = (_fmt(t_minus), _fmt(t_plus))
        for t, h in block:
            rows.append((_fmt(tau), _fmt(t), _fmt(h)) + extras)
    _write_csv(cfg["out"], header, rows)


def cmd_kz_scaling(cfg: dict) -> None:
    flank = "exit" if cfg.get("exit_flank") else "entry"
    points, fit = analysis.kz_scaling_experiment(
        cfg["delta"], cfg["g0"], cfg["gd"], cfg["tau_q_values"], cfg["grid_points"],
        _policy(cfg), cfg["merge_tol"], flank, _resolve_workers(cfg),
    )
    rows = [(_fmt(p.tau_q), _fmt(p.t_star), _fmt(p.t_c), _fmt(p.width))
            for p in points]
    _write_csv(cfg["out"], ["tau_q", "t_star", "t_c", "width"], rows)
    if abs(fit.exponent - _KZ_TARGET_EXPONENT) > _KZ_EXPONENT_BAND:
        print(
            f"note: fitted exponent {_fmt(fit.exponent)} lies outside "
            f"{_fmt(_KZ_TARGET_EXPONENT)} +- {_KZ_EXPONENT_BAND}: the sampled "
            "quench durations straddle a scaling-regime boundary",
            file=sys.stderr,
        )
    print(f"exponent={_fmt(fit.exponent)} r2={_fmt(fit.r_squared)}")


def cmd_compare(cfg: dict) -> None:
    model = _model_spec(cfg)
    ramp = RampProfile(cfg["ramp"], cfg["g0"], cfg["gd"], cfg["tau_q"])
    cells = analysis.compare_controls(
        model, ramp, cfg["sweep_values"], cfg["sweep_axis"], cfg["grid_points"],
        _policy(cfg), cfg["merge_tol"], _resolve_workers(cfg),
    )
    rows = [(_fmt(c.axis_value), _fmt(c.t), _fmt(c.h_full), _fmt(c.h_restricted),
             _fmt(c.mean_w), _fmt(c.adiabatic_w)) for c in cells]
    _write_csv(cfg["out"],
               ["axis_value", "t", "h_w_full", "h_w_restricted", "mean_w",
                "adiabatic_w"], rows)


RUNNERS = {
    "lz-dist": cmd_lz_dist,
    "entropy-map": cmd_entropy_map,
    "kz-scaling": cmd_kz_scaling,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        RUNNERS[args.command](cfg)
    except CdworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK
