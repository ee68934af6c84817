"""Report emission, trial sweeps, constant-stability scans and slope fits."""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInput, InvalidParameter
from .fourier import identity_symbol, plancherel_defect, random_symbol, SymbolField
from .groups import build_model
from .multipliers import (
    InverseWeight,
    MultiplierSpec,
    StepWeight,
    VerificationReport,
    _map,
    structured_probes,
    trial_function,
    verify_beta_infty,
    verify_hormander,
    verify_hyp,
    verify_lizorkin,
    verify_nikolskii,
)
from .spectral import loglog_fit

COLUMNS = ("inequality_id", "model", "p", "q", "b_or_gamma", "trials", "seed", "lhs", "rhs", "ratio", "pass")
STABILITY_GROWTH = 1.10


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _jsonable(x):
    """JSON-safe copy: non-finite floats become strings, numpy scalars become Python ones."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else _num(x)
    return x


def _row(r: VerificationReport) -> dict:
    bg = r.params.get("b")
    if bg is None:
        bg = r.params.get("gamma")
    return {
        "inequality_id": r.inequality_id, "model": r.model, "p": r.params.get("p"),
        "q": r.params.get("q"), "b_or_gamma": bg, "trials": r.trials, "seed": r.seed,
        "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio, "pass": bool(r.passed),
    }


def sort_reports(reports):
    return sorted(reports, key=lambda r: (r.inequality_id, r.model, -1 if r.seed is None else r.seed))


def render_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in sort_reports(reports):
        row = _row(r)
        w.writerow([row["inequality_id"], row["model"]] + [_num(row[c]) for c in COLUMNS[2:]])
    return buf.getvalue()


def render_json(reports) -> str:
    items = []
    for r in sort_reports(reports):
        d = _row(r)
        d["policy"] = r.policy
        d["params"] = r.params
        d["extra"] = r.extra
        items.append(_jsonable(d))
    return json.dumps(items, indent=2, sort_keys=True) + "\n"


def emit_report(reports, fmt: str, path) -> Path:
    """Write reports sorted by ``(inequality_id, model, seed)`` as CSV or JSON."""
    if fmt not in ("csv", "json"):
        raise InvalidParameter(f"unknown format {fmt!r}")
    text = render_csv(reports) if fmt == "csv" else render_json(reports)
    path = Path(path)
    path.write_text(text)
    return path


def fit_decay_slope(series):
    """Least-squares ``(slope, intercept, max residual)`` of ``log value`` vs ``log t``."""
    series = list(series)
    if len(series) < 3:
        raise InvalidInput("need at least 3 points")
    t, v = zip(*series)
    return loglog_fit(t, v)


# --------------------------------------------------------------------------
# building blocks shared by the CLI and the acceptance suite


def make_phi(spec, model=None):
    if spec in (None, "inverse", "1/t"):
        return InverseWeight()
    if spec == "dyadic":
        total = sum(p.plancherel_weight * p.dim for p in model.dual) if model is not None else 1.0
        return StepWeight.dyadic(total)
    if isinstance(spec, dict) and spec.get("kind") == "step":
        return StepWeight(spec["ends"], spec["values"])
    raise InvalidParameter(f"unknown weight {spec!r}")


def make_symbol(model, spec, seed: int) -> MultiplierSpec:
    """Symbol from a config mapping (``identity``, ``random``, ``decay``, ``heat``, ``shift``)."""
    spec = spec or {"kind": "identity"}
    kind = spec.get("kind", "identity")
    if kind == "identity":
        return MultiplierSpec(identity_symbol(model), "identity")
    if kind == "random":
        # symbol stream is disjoint from trial streams (seed, i)
        rng = np.random.default_rng([int(seed), 2**31 - 1])
        rank = spec.get("rank")
        rank = None if rank is None else {p.index: int(rank) for p in model.dual}
        return MultiplierSpec(random_symbol(model, rng, rank=rank), "random")
    if kind == "decay":
        a = float(spec.get("a", 1.0))
        blocks = tuple(p.spectral_tag ** -a * np.eye(p.dim, dtype=complex) for p in model.dual)
        return MultiplierSpec(SymbolField(model, blocks), f"decay({a:g})")
    if kind == "heat":
        t = float(spec.get("t", 0.1))
        blocks = tuple(np.exp(-t * p.eigenvalue) * np.eye(p.dim, dtype=complex) for p in model.dual)
        return MultiplierSpec(SymbolField(model, blocks), f"heat({t:g})")
    if kind == "shift" and model.kind == "cyclic":
        a, N = int(spec.get("a", 1)), model.params["N"]
        blocks = tuple(np.array([[np.exp(2j * np.pi * p.highest_weight[0] * a / N)]]) for p in model.dual)
        return MultiplierSpec(SymbolField(model, blocks), f"shift({a})")
    raise InvalidParameter(f"unknown symbol {spec!r}")


def _worst(reports):
    # first index wins ties, so the choice is independent of scheduling
    best = reports[0]
    for r in reports[1:]:
        if r.ratio > best.ratio:
            best = r
    return best


def sweep(model, check, trials: int, seed: int, workers: int = 1, probes: bool = True):
    """Run ``check(f)`` on seeded trials plus structured probes.

    Returns the worst report (largest ratio) with ``passed`` set to the
    conjunction over all checks and ``trials`` set to the number of checks.
    """
    fs = list(range(trials))
    reports = _map(lambda i: check(trial_function(model, seed, i)), fs, workers)
    if probes:
        reports += [check(f) for f in structured_probes(model)]
    worst = _worst(reports)
    worst.passed = all(r.passed for r in reports)
    worst.trials = len(reports)
    worst.seed = seed
    return worst


def plancherel_sweep(model, trials: int, seed: int, tol: float, workers: int = 1) -> VerificationReport:
    def check(f):
        d = plancherel_defect(f)
        return VerificationReport("plancherel", model.describe(), d, tol, {"p": 2.0, "q": 2.0}, d <= tol,
                                  "defect", seed, 1)
    return sweep(model, check, trials, seed, workers)


def run_verifier(model, inequality: str, params: dict, trials: int, seed: int, workers: int = 1):
    p = params.get("p")
    q = params.get("q")
    if inequality == "hyp":
        phi = make_phi(params.get("phi"), model)
        b = params.get("b", p / (p - 1) if p and p > 1 else None)
        rep = sweep(model, lambda f: verify_hyp(f, phi, p, b), trials, seed, workers)
        return rep
    if inequality == "nikolskii":
        return sweep(model, lambda f: verify_nikolskii(f, p, q), trials, seed, workers)
    A = make_symbol(model, params.get("symbol"), seed)
    if inequality == "hormander":
        return verify_hormander(A, p, q, trials, seed, workers)
    if inequality == "beta_infty":
        return verify_beta_infty(A, p, trials, seed, workers)
    if inequality == "lizorkin":
        return verify_lizorkin(A, p, q, float(params["t"]), trials, seed)
    raise InvalidParameter(f"unknown inequality {inequality!r}")


@dataclass
class ScanReport:
    inequality_id: str
    sizes: list
    constants: list
    reports: list = field(default_factory=list)

    @property
    def growth(self) -> float:
        if not self.constants or self.constants[0] == 0:
            return 1.0
        return self.constants[-1] / self.constants[0]

    @property
    def passed(self) -> bool:
        return len(self.constants) < 2 or self.growth <= STABILITY_GROWTH

    def summary(self) -> VerificationReport:
        first = self.constants[0] if self.constants else 0.0
        last = self.constants[-1] if self.constants else 0.0
        params = dict(self.reports[0].params) if self.reports else {}
        params["ladder"] = list(self.sizes)
        return VerificationReport(f"scan:{self.inequality_id}", f"ladder{list(self.sizes)}", last, first,
                                  params, self.passed, "stability",
                                  self.reports[0].seed if self.reports else None,
                                  sum(r.trials for r in self.reports), {"constants": list(self.constants)})

    def rows(self):
        return list(zip(self.sizes, self.constants))


def scan_constant_stability(ladder, inequality_id: str, params: dict, trials: int, seed: int,
                            model_kind: str = "cyclic", workers: int = 1) -> ScanReport:
    """Empirical constant ``max lhs/rhs`` along a ladder of model sizes.

    Passes when the last constant exceeds the first by at most 10%. A
    ladder of one size passes vacuously with a warning.
    """
    ladder = list(ladder)
    if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise InvalidParameter("ladder must be non-empty and strictly ascending")
    if len(ladder) == 1:
        warnings.warn("ladder of length 1: stability holds vacuously", stacklevel=2)
    size_key = {"cyclic": "N", "su2": "l_max", "torus": "band"}[model_kind]
    out = ScanReport(inequality_id, ladder, [])
    for size in ladder:
        spec = {"kind": model_kind, size_key: size}
        if model_kind == "torus":
            spec["d"] = params.get("d", 2)
        model = build_model(spec)
        rep = run_verifier(model, inequality_id, params, trials, seed, workers)
        out.reports.append(rep)
        out.constants.append(rep.ratio)
    return out


def write_scan_csv(scan: ScanReport, path) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "constant"])
    for s, c in scan.rows():
        w.writerow([s, _num(c)])
    path = Path(path)
    path.write_text(buf.getvalue())
    return path


def write_series_tsv(path, header, rows, description: str) -> Path:
    """TSV data file plus a plain-text description next to it."""
    path = Path(path)
    lines = ["\t".join(header)] + ["\t".join(_num(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    path.with_suffix(".txt").write_text(description.rstrip() + "\n")
    return path
