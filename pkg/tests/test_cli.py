import csv
import io
import json
import math
import os
import subprocess
import sys
from importlib import resources

import pytest

from ncklab import __version__
from ncklab.cli import run
from ncklab.schurhorn import harmonic

FIXTURE = str(resources.files("ncklab") / "data" / "e11_e12.json")


def _csv(text):
    lines = text.splitlines()
    head = [ln for ln in lines if ln.startswith("# ")]
    body = [ln for ln in lines if not ln.startswith("# ")]
    return head, list(csv.DictReader(io.StringIO("\n".join(body))))


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_empty_argv_usage(capsys):
    code, out, err = _run(capsys)
    assert code == 1 and "usage" in err


@pytest.mark.parametrize("argv", [
    ["nothing"],
    ["gnorm"],
    ["gnorm", "--input", FIXTURE, "--bogus", "1"],
    ["counterexample", "--family", "3"],
    ["gnorm", "--input", FIXTURE, "--p", "abc"],
])
def test_validation_errors_exit_1(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 1 and out == ""


def test_malformed_input_reports_position(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"items": [1\n')
    code, out, err = _run(capsys, "decompose", "--input", str(p))
    assert code == 1 and "MalformedInput" in err and "line" in err


def test_cap_exceeded_exit_1(capsys, tmp_path):
    items = [{"rows": 1, "cols": 1, "entries": [1.0]}] * 17
    p = tmp_path / "long.json"
    p.write_text(json.dumps({"items": items}))
    code, out, err = _run(capsys, "gnorm", "--input", str(p))
    assert code == 1 and "CapExceeded" in err


def test_numerical_failure_exit_2(capsys, monkeypatch):
    from ncklab import cli
    from ncklab.errors import NoConvergence

    def boom(*a, **k):
        raise NoConvergence("forced")
    monkeypatch.setattr(cli, "sweep", boom)
    code, out, err = _run(capsys, "counterexample", "--family", "1")
    assert code == 2
    diag = json.loads(err)
    assert diag["error"] == "NoConvergence" and diag["command"] == "counterexample"


def test_version(capsys):
    code, out, err = _run(capsys, "--version")
    assert code == 0 and __version__ in out


def test_counterexample_sweep(capsys):
    code, out, err = _run(capsys, "counterexample", "--family", "1", "--sweep", "16,64,256,1024")
    assert code == 0
    head, rows = _csv(out)
    assert head[0] == f"# ncklab {__version__}"
    assert len(rows) == 4
    for r in rows:
        N = int(r["N"])
        assert float(r["ratio"]) == pytest.approx(math.sqrt(harmonic(N)), rel=1e-9)
        assert r["verified"] in ("true", "false")
    assert [r["verified"] for r in rows] == ["true", "true", "true", "false"]


def test_decompose_fixture_json(capsys, tmp_path):
    out_path = tmp_path / "dec.json"
    code, out, err = _run(capsys, "decompose", "--input", FIXTURE, "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["primal"] == pytest.approx(math.sqrt(2), abs=1e-6)
    assert doc["gap"] <= 1e-6 and doc["config"]["tol"] == 1e-7
    assert set(doc) >= {"y", "z", "u", "dual_bound", "iterations", "ncklab_version"}


def test_decompose_csv(capsys):
    code, out, err = _run(capsys, "decompose", "--input", FIXTURE, "--format", "csv")
    head, rows = _csv(out)
    assert float(rows[0]["primal"]) == pytest.approx(math.sqrt(2), abs=1e-6)
    assert rows[0]["tol"] == "1e-07"


def test_factorize_fixture(capsys):
    code, out, err = _run(capsys, "factorize", "--input", FIXTURE)
    assert code == 0
    doc = json.loads(out)
    res = doc["residuals"]
    assert max(res.values()) <= 1e-6
    assert doc["decomposition"]["gap"] <= 1e-6 and doc["rank_tol"] == 1e-8


def test_gnorm_models(capsys):
    code, out, err = _run(capsys, "gnorm", "--input", FIXTURE, "--p", "2")
    _, rows = _csv(out)
    assert rows[0]["model"] == "rademacher" and rows[0]["surrogate"] == "false"
    # ||Gx||_2 = ||Rx||_2 = sqrt(2)
    assert float(rows[0]["g_norm"]) == pytest.approx(math.sqrt(2))
    code, out, err = _run(capsys, "gnorm", "--input", FIXTURE, "--model", "haar:8", "--p", "inf")
    assert code == 0
    _, rows = _csv(out)
    assert rows[0]["model"] == "haar_surrogate:8" and rows[0]["g_weak"] == ""


def test_kfunc_profile(capsys, tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"steps": [[3, 1], [1, 1]]}))
    code, out, err = _run(capsys, "kfunc", "--input", str(p), "--t", "0.5,1.5,10")
    _, rows = _csv(out)
    assert [float(r["K"]) for r in rows] == [1.5, 3.5, 4.0]
    assert all(r["exact"] == "true" for r in rows)
    code, out, err = _run(capsys, "kfunc", "--input", str(p), "--p", "2", "--q", "1")
    assert code == 1


def test_kfunc_matrix_json(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"rows": 2, "cols": 2, "entries": [3, 0, 0, 1]}))
    code, out, err = _run(capsys, "kfunc", "--input", str(p), "--p", "2", "--t-count", "5",
                          "--format", "json")
    doc = json.loads(out)
    assert doc["columns"] == ["t", "K", "exact"] and len(doc["rows"]) == 5
    assert doc["meta"]["input_kind"] == "matrix"


def test_ineq_and_power_suites(capsys):
    code, out, err = _run(capsys, "ineq-suite", "--trials", "5", "--d-max", "4")
    _, rows = _csv(out)
    assert len(rows) == 20 and all(r["ok"] == "true" for r in rows)
    code, out, err = _run(capsys, "power-suite", "--trials", "2", "--format", "json")
    doc = json.loads(out)
    assert doc["meta"]["all_in_envelope"] is True and len(doc["rows"]) == 12


def test_khintchine_weak1(capsys):
    code, out, err = _run(capsys, "khintchine-weak1", "--count", "4")
    head, rows = _csv(out)
    assert len(rows) == 4 and all(r["model"] == "rademacher" for r in rows)
    code, out, err = _run(capsys, "khintchine-weak1", "--input", FIXTURE)
    _, rows = _csv(out)
    assert float(rows[0]["ratio"]) == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("argv", [
    ["khintchine-weak1", "--count", "3"],
    ["counterexample", "--family", "2", "--sweep", "4,8", "--format", "json"],
    ["ineq-suite", "--trials", "3"],
    ["decompose", "--input", FIXTURE],
])
def test_byte_reproducible(tmp_path, argv):
    outs = []
    for k in range(2):
        p = tmp_path / f"o{k}"
        assert run(argv + ["--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "ncklab.cli", "counterexample", "--family", "2",
                          "--n", "4"], capture_output=True, text=True, env=dict(os.environ))
    assert out.returncode == 0
    _, rows = _csv(out.stdout)
    assert float(rows[0]["r_weak2"]) == pytest.approx(math.sqrt(8), rel=1e-12)
