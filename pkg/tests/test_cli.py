import json
import math
import subprocess
import sys

import pytest

from lorentz2d import bclasses
from lorentz2d.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rearrange_witness(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"hx": 1, "hy": 1, "values": [[1, 0], [1, 0], [1, 1]]}))
    out_path = tmp_path / "out.json"
    code, _, _ = run(capsys, "rearrange", "--input", str(path), "--mode", "yx", "--output", str(out_path))
    assert code == 0
    assert json.loads(out_path.read_text())["values"] == [[1, 1], [1, 0], [1, 0]]


def test_rearrange_identity_on_decreasing(tmp_path, capsys):
    path = tmp_path / "d.json"
    vals = [[3, 2, 1], [2, 1, 0]]
    path.write_text(json.dumps({"hx": 0.5, "hy": 1, "values": vals}))
    code, out, _ = run(capsys, "rearrange", "--input", str(path))
    assert code == 0 and json.loads(out)["values"] == vals


def test_malformed_input_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{oops")
    code, _, err = run(capsys, "rearrange", "--input", str(path))
    assert code == 2 and "error" in err
    path.write_text(json.dumps({"hx": 1, "hy": 1, "values": [[1, -2]]}))
    assert run(capsys, "rearrange", "--input", str(path))[0] == 2
    assert run(capsys, "rearrange", "--input", str(tmp_path / "missing.json"))[0] == 2


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "norm", "--example", "r25i", "--norm", "bogus")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "norm", "--norm", "lambda2")[0] == 2
    assert run(capsys, "weight-check", "--weight", "power:1", "--mode", "bp", "--p", "2")[0] == 2


def test_norm_examples(capsys):
    code, out, _ = run(capsys, "norm", "--example", "r25i", "--N", "4", "--p", "1", "--norm", "lambda2")
    assert code == 0 and float(out) == pytest.approx(25 / 12, rel=1e-14)
    code, out, _ = run(capsys, "norm", "--example", "r25i", "--N", "4", "--p", "1", "--norm", "mixed")
    assert float(out) == pytest.approx(1.0, rel=1e-14)
    code, out, _ = run(capsys, "norm", "--example", "unit-square", "--p", "2", "--norm", "lambda2")
    assert float(out) == pytest.approx(1.0)


def test_norm_star_json(capsys):
    code, out, _ = run(capsys, "--json", "norm", "--example", "unit-square", "--p", "2", "--norm", "star")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == pytest.approx(2.0, rel=1e-3) and doc["converged"]


def test_hardy_points_and_weak_curve(capsys):
    code, out, _ = run(capsys, "hardy", "--example", "hardy-witness", "--op", "s21", "--points", "1,2")
    assert code == 0
    assert float(out.splitlines()[1].split(",")[2]) == pytest.approx(2.5)
    code, out, _ = run(capsys, "hardy", "--example", "unit-square", "--weak-curve", "0.1,0.01")
    rows = out.splitlines()
    assert rows[0].startswith("lambda,")
    assert float(rows[2].split(",")[1]) == pytest.approx(1 + math.log(100))
    code, out, _ = run(capsys, "hardy", "--example", "unit-square", "--superlevel", "0.5")
    assert json.loads(out)["exact"] is True


def test_hardy_query_grid(capsys):
    code, out, _ = run(capsys, "hardy", "--example", "unit-square", "--query-cells", "2,3", "--box", "2,3")
    assert code == 0 and len(out.splitlines()) == 1 + 6


def test_weight_check(capsys):
    code, out, _ = run(capsys, "weight-check", "--weight", "power:1,-0.5", "--p", "2")
    assert json.loads(out)["constant"] == pytest.approx(1 / 3)
    code, out, _ = run(capsys, "weight-check", "--weight", "power:1,1", "--mode", "b1inf")
    assert json.loads(out)["infinite"] is True
    code, out, _ = run(capsys, "weight-check", "--weight", "power:1,-0.5*power:1,-0.5", "--mode", "b21-sup",
                       "--box", "4,4", "--cells", "4,4")
    assert json.loads(out)["constant"] == pytest.approx(4.0)
    code, out, _ = run(capsys, "weight-check", "--weight", "const:1*const:1", "--mode", "b2p", "--p", "1")
    doc = json.loads(out)
    assert doc["member"] is False and any("Banach" in n for n in doc["notes"])
    code, out, _ = run(capsys, "weight-check", "--weight", "power:1,-0.5*power:1,-0.5", "--mode", "b21-sup",
                       "--box", "4,4", "--trend", "2,4")
    assert out.splitlines()[0] == "cells,staircase_sup,method" and len(out.splitlines()) == 3


def test_embed_and_covering(tmp_path, capsys):
    code, out, _ = run(capsys, "embed", "--trials", "10")
    doc = json.loads(out)
    assert code == 0 and doc["constant"] == pytest.approx(1.0) and doc["check"]["passed"]
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps({"heights": [[0, 0], [1, 0], [2, 2]]}))
    code, out, _ = run(capsys, "covering", "--family", str(fam), "--p", "2", "--q", "1")
    assert json.loads(out)["I3"] == pytest.approx(3.25)
    code, out, _ = run(capsys, "covering", "--family", str(fam), "--p", "2", "--q", "1", "--dir", "reverse")
    assert json.loads(out)["J3"] == pytest.approx(3.25)


def test_global_flags_before_and_after(capsys):
    a = run(capsys, "--seed", "5", "--json", "norm", "--example", "unit-square", "--norm", "weak")
    b = run(capsys, "norm", "--seed", "5", "--json", "--example", "unit-square", "--norm", "weak")
    assert a == b and json.loads(a[1])["value"] == 1.0


def test_verify_deterministic(tmp_path, capsys):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "paper-verify", "--seed", "1", "--output", str(p1))[0] == 0
    assert run(capsys, "paper-verify", "--seed", "1", "--threads", "4", "--output", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()
    doc = json.loads(p1.read_text())
    ids = [c["id"] for c in doc["checks"]]
    assert ids == sorted(ids) and len(ids) == 12
    assert all(c["anchor"] for c in doc["checks"])


def test_verify_flags_mutation(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(bclasses, "b2_product_formula", lambda u, v: 4.5)
    out_path = tmp_path / "r.json"
    code, _, err = run(capsys, "paper-verify", "--output", str(out_path))
    assert code == 1
    doc = json.loads(out_path.read_text())
    failed = [c["id"] for c in doc["checks"] if not c["passed"]]
    assert failed == ["09-product-weight-formula"]
    assert "09-product-weight-formula" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lorentz2d", "norm", "--example", "r25ii", "--N", "8",
                          "--norm", "mixed", "--order", "x-then-y"], capture_output=True, text=True)
    assert res.returncode == 0
    assert float(res.stdout) == pytest.approx(2 - 2.0**-7)
