"""Command line entry point: ``lpqlab run|scan|fit``.

Exit codes: 0 when every check passes, 1 when any check fails (or a
report cannot be written), 2 for usage and configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .errors import LabError
from .groups import build_model
from .report import (
    emit_report,
    fit_decay_slope,
    plancherel_sweep,
    run_verifier,
    scan_constant_stability,
    write_scan_csv,
    write_series_tsv,
)
from .multipliers import VerificationReport
from .spectral import (
    empirical_heat_bound,
    heat_decay_bound,
    heisenberg_trace_exact,
    laplacian_data,
    loglog_fit,
    spectral_counting,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_index = {"anyOf": [{"type": "number", "exclusiveMinimum": 1}, {"const": "inf"}]}

SCHEMA = {
    "type": "object",
    "required": ["model", "experiment"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "model": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["cyclic", "torus", "su2", "heisenberg_spectral", "euclidean_radial"]},
                "N": {"type": "integer", "minimum": 1},
                "d": {"type": "integer", "minimum": 1},
                "band": {"type": "integer", "minimum": 0},
                "l_max": {"type": "number", "minimum": 0},
                "quad_order": {"type": "integer", "minimum": 1},
                "n": {"type": "integer", "minimum": 1},
                "lambda_min": {"type": "number", "exclusiveMinimum": 0},
                "lambda_max": {"type": "number", "exclusiveMinimum": 0},
                "cells": {"type": "integer", "minimum": 1},
                "K": {"type": "integer", "minimum": 1},
                "mirrored": {"type": "boolean"},
                "R": {"type": "number", "exclusiveMinimum": 0},
                "shells": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "experiment": {"enum": ["transform", "verify", "spectral", "heat", "scan"]},
        "inequality": {"enum": ["hyp", "nikolskii", "hormander", "beta_infty", "lizorkin"]},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "p": _index,
                "q": _index,
                "b": {"type": "number", "exclusiveMinimum": 1},
                "gamma": {"type": "number", "minimum": 0},
                "m": {"type": "number"},
                "t": {"type": "number", "exclusiveMinimum": 0},
                "ts": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 3},
                "s": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "shift": {"type": "number", "minimum": 0},
                "phi": {"anyOf": [{"enum": ["inverse", "1/t", "dyadic"]}, {"type": "object"}]},
                "symbol": {"type": "object"},
                "d": {"type": "integer", "minimum": 1},
            },
        },
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "ladder": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}, "format": {"enum": ["csv", "json"]}},
            "additionalProperties": False,
        },
    },
    "allOf": [
        {"if": {"properties": {"experiment": {"enum": ["verify", "scan"]}}},
         "then": {"required": ["inequality", "seed", "params"]}},
        {"if": {"properties": {"experiment": {"const": "transform"}}}, "then": {"required": ["seed"]}},
        {"if": {"properties": {"experiment": {"const": "scan"}}}, "then": {"required": ["ladder"]}},
    ],
}


class ConfigError(LabError):
    pass


def _line_of(text: str, path) -> int:
    """Best-effort line number of the JSON key at the end of ``path``."""
    keys = [k for k in path if isinstance(k, str)]
    line, pos = 1, 0
    for k in keys:
        i = text.find(f'"{k}"', pos)
        if i < 0:
            break
        pos = i
    if keys and pos:
        line = text.count("\n", 0, pos) + 1
    return line


def load_config(path) -> dict:
    """Parse and validate a config file; errors carry ``file:line:`` anchors."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(x) for x in e.absolute_path) or "<root>"
        raise ConfigError(f"{path}:{_line_of(text, e.absolute_path)}: {where}: {e.message}")
    return cfg


def _params(cfg) -> dict:
    params = dict(cfg.get("params", {}))
    for key in ("p", "q"):
        if params.get(key) == "inf":
            params[key] = math.inf
    return params


def run_experiment(cfg: dict, out_dir: Path, workers: int = 1) -> list:
    """Execute one experiment; returns its reports and writes side files to ``out_dir``."""
    kind = cfg["experiment"]
    params = _params(cfg)
    seed = cfg.get("seed")
    trials = cfg.get("trials", 100)
    name = cfg.get("name", "experiment")
    if kind == "scan":
        scan = scan_constant_stability(cfg["ladder"], cfg["inequality"], params, trials, seed,
                                       cfg["model"]["kind"], workers)
        write_scan_csv(scan, out_dir / f"{name}_scan.csv")
        return scan.reports + [scan.summary()]
    model = build_model(cfg["model"])
    if kind == "transform":
        tol = params.get("tol", 1e-8 if model.kind == "su2" else 1e-12)
        return [plancherel_sweep(model, trials, seed, tol, workers)]
    if kind == "verify":
        return [run_verifier(model, cfg["inequality"], params, trials, seed, workers)]
    if kind == "spectral":
        return [_spectral_report(model, params, out_dir, name)]
    if kind == "heat":
        return [_heat_report(model, params, out_dir, name)]
    raise ConfigError(f"unknown experiment {kind!r}")


def _spectral_report(model, params, out_dir, name):
    L = laplacian_data(model, params.get("shift", 1.0))
    tol = params.get("tol", 0.01)
    s_vals = params.get("s") or list(np.geomspace(max(L.s_min, 0.1), L.s_max / 2, 9))
    if any(s > L.s_max / 2 or s < L.s_min for s in s_vals):
        raise ConfigError(f"s must lie in the validity window [{L.s_min:g}, {L.s_max / 2:g}]")
    if model.kind == "heisenberg_spectral":
        ref = lambda s: heisenberg_trace_exact(model.params["n"], s)
    elif L.tail_law is not None:
        ref = lambda s: L.tail_law[1] * s ** L.tail_law[0]
    else:
        raise ConfigError("no reference law for this model")
    rows = [(s, spectral_counting(L, s), ref(s)) for s in s_vals]
    errs = [abs(c / r - 1) for _, c, r in rows]
    i = int(np.argmax(errs))
    write_series_tsv(out_dir / f"{name}_counts.tsv", ["s", "count", "reference"], rows,
                     f"Spectral counting tau(E_(0,s)) for {L.label} against the reference law; "
                     "columns: s, grid count, reference value.")
    return VerificationReport("trace_law", model.describe(), rows[i][1], rows[i][2],
                              {"p": None, "q": None, "s": s_vals, "tol": tol}, errs[i] <= tol,
                              "relative-tolerance", None, len(rows), {"max_rel_error": errs[i]})


def _heat_report(model, params, out_dir, name):
    p, q = params.get("p", 4 / 3), params.get("q", 4.0)
    ts = params.get("ts") or list(np.geomspace(1e-3, 1e-1, 15))
    tol = params.get("tol", 0.03)
    L = laplacian_data(model, params.get("shift", 1.0))
    closed = [heat_decay_bound(L, t, p, q) for t in ts]
    emp = [empirical_heat_bound(L, t, p, q) for t in ts]
    alpha = L.tail_law[0]
    predicted = -alpha * (1 / p - 1 / q)
    slope, _, _ = loglog_fit(ts, emp)
    cslope, _, _ = loglog_fit(ts, closed)
    write_series_tsv(out_dir / f"{name}_heat.tsv", ["t", "empirical", "closed_form"], list(zip(ts, emp, closed)),
                     f"Heat decay for {L.label}, p={p:g}, q={q:g}: empirical sup_u tau(E_(0,u))^(1/r) e^(-tu) "
                     "and the closed-form tail-law bound; plot both on log-log axes against t.")
    # decay rates (negated slopes) keep lhs and rhs positive
    rep = VerificationReport("heat_decay", model.describe(), -slope, -predicted,
                             {"p": p, "q": q, "ts": ts, "tol": tol},
                             abs(slope / predicted - 1) <= tol and abs(cslope - predicted) <= 1e-12,
                             "relative-tolerance", None, len(ts), {"closed_form_slope": cslope})
    return rep


def _write(reports, out_dir: Path, name: str, fmt: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    emit_report(reports, fmt, out_dir / f"{name}.{fmt}")


def run_config(path, out=None, fmt=None, workers: int = 1, seed: int | None = None) -> int:
    """Run the experiment described by a config file; returns the exit code."""
    try:
        cfg = load_config(path)
        if seed is not None:
            cfg["seed"] = seed
        cfg.setdefault("name", Path(path).stem)
        out_dir = Path(out or cfg.get("output", {}).get("dir", "."))
        fmt = fmt or cfg.get("output", {}).get("format", "csv")
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        reports = run_experiment(cfg, out_dir, workers)
        _write(reports, out_dir, cfg["name"], fmt)
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for r in reports:
        print(f"{r.inequality_id:<14} {r.model:<32} ratio={r.ratio:.6g} {'pass' if r.passed else 'FAIL'}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def run_fit(path, out=None) -> int:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        series = [(float(r[0]), float(r[1])) for r in rows]
        slope, intercept, resid = fit_decay_slope(series)
    except (OSError, ValueError, IndexError, LabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = {"slope": slope, "intercept": intercept, "max_residual": resid, "points": len(series)}
    print(f"slope={slope:.17g} intercept={intercept:.17g} max_residual={resid:.3g}")
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / f"{Path(path).stem}_fit.json").write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpqlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, helptext in (("run", "run one experiment config"), ("scan", "run a constant-stability scan config")):
        sp = sub.add_parser(cmd, help=helptext)
        sp.add_argument("config")
        sp.add_argument("--out", help="output directory (default: config output.dir or .)")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--seed", type=int, help="override the config seed")
    fp = sub.add_parser("fit", help="log-log slope fit of a two-column CSV series")
    fp.add_argument("series")
    fp.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "fit":
        return run_fit(args.series, args.out)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "scan":
        try:
            if load_config(args.config)["experiment"] != "scan":
                print("error: scan needs a config with experiment = scan", file=sys.stderr)
                return EXIT_USAGE
        except LabError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    return run_config(args.config, args.out, args.format, args.workers, args.seed)


if __name__ == "__main__":
    sys.exit(main())
