import csv
import io
import json
import math
import subprocess
import sys
import warnings

import numpy as np
import pytest

from lpqlab import InvalidInput, VerificationReport, emit_report, fit_decay_slope, scan_constant_stability
from lpqlab.cli import main, run_config
from lpqlab.report import COLUMNS, render_csv, render_json
from lpqlab.spectral import heat_decay_bound, law_only


def report(i, ineq="hyp", model="cyclic(N=4)", seed=0):
    return VerificationReport(ineq, model, 1.0 + i, 2.0, {"p": 1.5, "q": 3.0, "b": 2.0}, True, "constant-1", seed, 10)


def write(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg, indent=1))
    return path


def test_csv_header_and_round_trip(tmp_path):
    emit_report([], "csv", tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == ",".join(COLUMNS) + "\n"
    r = report(0.1234567890123456789)
    emit_report([r], "csv", tmp_path / "one.csv")
    rows = list(csv.DictReader(open(tmp_path / "one.csv")))
    assert len(rows) == 1
    assert float(rows[0]["lhs"]) == r.lhs and float(rows[0]["ratio"]) == r.ratio
    assert rows[0]["pass"] == "true" and rows[0]["b_or_gamma"] == "2"


def test_ordering_is_stable():
    rng = np.random.default_rng(0)
    reps = [report(i, ineq=rng.choice(["hyp", "nikolskii"]), model=f"cyclic(N={rng.integers(2, 9)})",
                   seed=int(rng.integers(0, 50))) for i in range(1000)]
    rows = list(csv.DictReader(io.StringIO(render_csv(reps))))
    keys = [(r["inequality_id"], r["model"], int(r["seed"])) for r in rows]
    assert keys == sorted(keys)


def test_json_mirrors_csv():
    r = report(0.5)
    r.extra["bad"] = math.inf
    items = json.loads(render_json([r]))
    assert set(COLUMNS) <= set(items[0])
    assert items[0]["extra"]["bad"] == "inf" and items[0]["ratio"] == 0.75


def test_fit_decay_slope():
    series = [(t, 5.0 / t) for t in np.geomspace(1e-3, 1, 8)]
    slope, _, res = fit_decay_slope(series)
    assert abs(slope + 1) <= 1e-12
    L = law_only(2.0, 1.0)
    heat = [(t, heat_decay_bound(L, t, 4 / 3, 4)) for t in np.geomspace(1e-3, 1, 8)]
    assert abs(fit_decay_slope(heat)[0] + 1.0) <= 1e-12
    assert abs(fit_decay_slope([(1, 2), (2, 2), (3, 2)])[0]) <= 1e-12
    with pytest.raises(InvalidInput):
        fit_decay_slope([(1, 1), (2, 0), (3, 1)])
    with pytest.raises(InvalidInput):
        fit_decay_slope([(1, 1), (2, 1)])


def test_scan_ladder_of_one_warns():
    with pytest.warns(UserWarning):
        scan = scan_constant_stability([16], "hormander", {"p": 4 / 3, "q": 4}, 5, 1)
    assert scan.passed


def test_scan_identity_constants_at_most_one():
    scan = scan_constant_stability([16, 64, 256], "hormander", {"p": 4 / 3, "q": 4}, 10, 1)
    assert all(c <= 1 + 1e-12 for c in scan.constants) and scan.passed


def test_run_hyp_plancherel(tmp_path):
    cfg = {"model": {"kind": "cyclic", "N": 256}, "experiment": "verify", "inequality": "hyp",
           "params": {"p": 2, "b": 2}, "trials": 50, "seed": 3}
    code = run_config(write(tmp_path, "hyp.json", cfg), out=tmp_path / "out")
    assert code == 0
    row = next(csv.DictReader(open(tmp_path / "out" / "hyp.csv")))
    assert abs(float(row["ratio"]) - 1.0) <= 1e-12


def test_bad_exponent_exits_2_with_line(tmp_path, capsys):
    text = '{\n  "model": {"kind": "cyclic", "N": 8},\n  "experiment": "verify",\n  "inequality": "hyp",\n' \
           '  "params": {"p": 0.5, "b": 2},\n  "seed": 1\n}\n'
    path = write(tmp_path, "bad.json", text)
    assert run_config(path, out=tmp_path) == 2
    err = capsys.readouterr().err
    assert "bad.json:5:" in err and "params/p" in err


def test_malformed_json_exits_2(tmp_path, capsys):
    path = write(tmp_path, "broken.json", '{\n "model": {"kind": "cyclic",\n}')
    assert run_config(path) == 2
    assert "broken.json:3:" in capsys.readouterr().err


def test_missing_seed_is_a_config_error(tmp_path):
    cfg = {"model": {"kind": "cyclic", "N": 8}, "experiment": "verify", "inequality": "hyp", "params": {"p": 2}}
    assert run_config(write(tmp_path, "noseed.json", cfg)) == 2


def test_precondition_violation_exits_2(tmp_path):
    cfg = {"model": {"kind": "cyclic", "N": 8}, "experiment": "verify", "inequality": "hormander",
           "params": {"p": 3, "q": 4}, "seed": 1}
    assert run_config(write(tmp_path, "pre.json", cfg), out=tmp_path) == 2


def test_failing_check_exits_1(tmp_path):
    cfg = {"model": {"kind": "heisenberg_spectral", "n": 1, "cells": 20, "K": 20}, "experiment": "spectral",
           "params": {"tol": 1e-9, "s": [1.0, 5.0]}}
    assert run_config(write(tmp_path, "tight.json", cfg), out=tmp_path) == 1


def test_unwritable_output_exits_1(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = {"model": {"kind": "cyclic", "N": 8}, "experiment": "transform", "seed": 1, "trials": 3}
    assert run_config(write(tmp_path, "t.json", cfg), out=blocker) == 1


def test_nikolskii_json_is_independent_of_workers(tmp_path):
    cfg = {"model": {"kind": "su2", "l_max": 2}, "experiment": "verify", "inequality": "nikolskii",
           "params": {"p": 1.5, "q": 4}, "trials": 1000, "seed": 42}
    path = write(tmp_path, "nik.json", cfg)
    assert main(["run", str(path), "--out", str(tmp_path / "w1"), "--format", "json", "--workers", "1"]) == 0
    assert main(["run", str(path), "--out", str(tmp_path / "w4"), "--format", "json", "--workers", "4"]) == 0
    assert (tmp_path / "w1" / "nik.json").read_bytes() == (tmp_path / "w4" / "nik.json").read_bytes()


def test_seed_flag_overrides(tmp_path):
    cfg = {"model": {"kind": "cyclic", "N": 16}, "experiment": "transform", "seed": 1, "trials": 3}
    path = write(tmp_path, "tr.json", cfg)
    assert main(["run", str(path), "--out", str(tmp_path), "--seed", "9"]) == 0
    assert next(csv.DictReader(open(tmp_path / "tr.csv")))["seed"] == "9"


def test_heat_and_scan_configs(tmp_path):
    heat = {"model": {"kind": "su2", "l_max": 40}, "experiment": "heat",
            "params": {"p": 1.3333333333333333, "q": 4, "ts": [0.01, 0.02, 0.05, 0.1]}}
    assert run_config(write(tmp_path, "heat.json", heat), out=tmp_path) == 0
    assert (tmp_path / "heat_heat.tsv").exists() and (tmp_path / "heat_heat.txt").exists()
    scan = {"model": {"kind": "cyclic"}, "experiment": "scan", "inequality": "hormander",
            "params": {"p": 1.3333333333333333, "q": 4}, "ladder": [16, 64], "trials": 5, "seed": 2}
    path = write(tmp_path, "scan.json", scan)
    assert main(["scan", str(path), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "scan_scan.csv").read_text().startswith("size,constant\n")
    assert main(["scan", str(write(tmp_path, "notscan.json", heat))]) == 2


def test_fit_subcommand(tmp_path, capsys):
    series = tmp_path / "series.csv"
    series.write_text("t,value\n" + "".join(f"{t},{2 * t ** -0.5}\n" for t in (0.1, 0.2, 0.4, 0.8)))
    assert main(["fit", str(series), "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "series_fit.json").read_text())
    assert abs(out["slope"] + 0.5) <= 1e-12
    bad = tmp_path / "bad.csv"
    bad.write_text("1,1\n2,-1\n3,1\n")
    assert main(["fit", str(bad)]) == 2


def test_usage_errors():
    assert main([]) == 2
    assert main(["frobnicate"]) == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lpqlab.cli", "fit", str(tmp_path / "missing.csv")],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "error" in proc.stderr
