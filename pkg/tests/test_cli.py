import csv
import io
import json
import os
import subprocess
import sys

import pytest

from pshlab.cli import main

import oracles


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mass_log_norm_passes(capsys):
    code, out, _ = run(["mass", "--fn", "log_norm", "--R", "0.3,0.6", "--method", "boundary"], capsys)
    assert code == 0
    rep = json.loads(out)
    vals = [c["value"] for c in rep["checks"] if c["name"].startswith("ma_boundary")]
    assert vals == pytest.approx([1.0, 1.0], abs=1e-6)
    assert rep["config"]["R"] == [0.3, 0.6]
    assert rep["timing_ms"] is None


def test_mass_quad_expected(capsys):
    code, out, _ = run(["mass", "--fn", "quad", "--R", "0.7", "--method", "boundary"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["checks"][0]["value"] == pytest.approx(0.7 ** 4, rel=1e-6)


def test_lelong_half_log_reports_failure(capsys):
    code, out, _ = run(["lelong", "--fn", "half_log"], capsys)
    rep = json.loads(out)
    assert code == 1
    assert any(c["pass"] is False and c["provenance"] == "PAPER" for c in rep["checks"])


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"fn": "quad", "bogus": 1}))
    code, _, err = run(["mass", "--config", str(cfg)], capsys)
    assert code == 2 and "bogus" in err


def test_unknown_fn_exits_2(capsys):
    code, _, err = run(["mass", "--fn", "no_such_fn"], capsys)
    assert code == 2 and "error" in err


def test_bad_quadrature_exits_2(capsys):
    code, _, _ = run(["mass", "--fn", "quad", "--ntheta", "31"], capsys)
    assert code == 2


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"fn": "quad", "R": [0.2], "quadrature": {"n_eta": 24}, "method": "boundary"}))
    _, out, _ = run(["mass", "--config", str(cfg), "--R", "0.4"], capsys)
    c = json.loads(out)["config"]
    # command line beats the file, the file beats the defaults
    assert c["R"] == [0.4] and c["fn"] == "quad"
    assert c["quadrature"]["n_eta"] == 24 and c["quadrature"]["n_theta"] == 32


def test_csv_columns(capsys):
    code, out, _ = run(["mass", "--fn", "log_norm", "--R", "0.3,0.6", "--method", "boundary",
                        "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["section", "name", "value", "expected", "provenance", "tol", "pass", "x", "y"]
    assert {r[0] for r in rows[1:]} == {"check", "series"}
    series = [r for r in rows if r[0] == "series"]
    assert [float(r[7]) for r in series] == [0.3, 0.6]


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, out, _ = run(["bound", "--fn", "log_norm", "--R", "0.3", "--output", str(path)], capsys)
    assert code == 0 and out == ""
    rep = json.loads(path.read_text())
    assert any(c["name"].startswith("slack") and c["pass"] for c in rep["checks"])


def test_psh_check_aliases(capsys):
    a = run(["psh-check", "--fn", "one_n_symm", "--param", "n=3", "--n", "20"], capsys)
    b = run(["psh-check", "--fn", "one_n_symm", "--params", "n=3", "--samples", "20"], capsys)
    assert a == b and a[0] == 0
    assert json.loads(a[1])["config"]["params"] == {"n": 3}


def test_psh_check_default_samples(capsys):
    _, out, _ = run(["psh-check", "--fn", "quad"], capsys)
    assert json.loads(out)["config"]["n"] == 100


def test_pohozaev_and_separation(capsys):
    code, out, _ = run(["pohozaev", "--fn", "quad", "--R", "0.5", "--zeta", "0.3-0.2i"], capsys)
    assert code == 0
    lhs = [c for c in json.loads(out)["checks"] if c["name"] == "lhs R=0.5"][0]
    assert lhs["value"] == pytest.approx(oracles.pohozaev_quad(0.5, 0.5), abs=1e-8)
    code, out, _ = run(["separation"], capsys)
    assert code == 0 and json.loads(out)["config"]["fn"] == "separated"


def test_frames_selftest(capsys):
    code, out, _ = run(["frames-selftest", "--fn", "quad", "--n", "20"], capsys)
    assert code == 0
    assert {c["name"] for c in json.loads(out)["checks"]} >= {"duality", "reeb field"}


def test_mollify_check_log_norm(capsys):
    code, out, _ = run(["mollify-check", "--fn", "log_norm"], capsys)
    rep = json.loads(out)
    assert code == 0
    names = [c["name"] for c in rep["checks"]]
    assert "kernel mass" in names and "friedrichs point 9" in names
    assert len(rep["series"]["L_diff_A4"]) == 3


def test_output_is_deterministic(capsys):
    argv = ["psh-check", "--fn", "sym_plus_re", "--n", "30", "--seed", "4"]
    assert run(argv, capsys) == run(argv, capsys)


def _subprocess(argv, threads):
    env = dict(os.environ, PSH_LAB_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "pshlab", *argv], capture_output=True, text=True, env=env)


def test_thread_count_does_not_change_output():
    argv = ["mass", "--fn", "quad", "--R", "0.4,0.8", "--method", "all"]
    a = _subprocess(argv, 1)
    b = _subprocess(argv, 4)
    c = _subprocess(argv + ["--threads", "2"], 1)
    assert a.returncode == b.returncode == c.returncode == 0
    assert a.stdout == b.stdout == c.stdout


def test_version_flag():
    r = subprocess.run([sys.executable, "-m", "pshlab", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("pshlab ")
