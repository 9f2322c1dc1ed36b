import json
import math
import subprocess
import sys

import numpy as np
import pytest

import gausswork.work as work_mod
from gausswork.cli import main
from gausswork.states import build_symmetric_pure_tripartite, standard_form_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def last_json(text):
    return json.loads(text.strip().splitlines()[-1])


def test_work_symmetric_homodyne(capsys):
    code, out, _ = run(capsys, "work", "--family", "sym-sts", "--a", "3", "--c", "2", "--lambda", "0")
    assert code == 0
    assert out.splitlines()[0].startswith("W=0.293893, W_sep=0.592812")
    info = last_json(out)
    assert info["witness"] == "separable" and info["ppt"]["label"] == "separable"
    assert info["W"] == pytest.approx(0.5 * math.log(9 / 5), abs=1e-12)
    assert info["W"] == pytest.approx(info["W_closed"], abs=1e-12)


def test_work_entangled_example(capsys):
    code, out, _ = run(capsys, "work", "--family", "sym-sts", "--a", "3", "--c", "2.8", "--lambda", "0")
    info = last_json(out)
    assert code == 0 and info["witness"] == "entangled"
    assert info["W"] == pytest.approx(0.5 * math.log(9 / 1.16), abs=1e-12)


def test_work_unphysical_exits_2(capsys):
    code, _, err = run(capsys, "work", "--family", "sym-sts", "--a", "3", "--c", "3")
    assert code == 2 and "sqrt(a^2 - 1/4)" in err


@pytest.mark.parametrize("argv", [
    ["work", "--family", "sts", "--a", "3"],
    ["work", "--family", "sym-sts", "--a", "3", "--c", "1", "--c1", "2"],
    ["work"],
    ["work", "--family", "sts", "--a", "1", "--b", "1", "--c", "0.2", "--lambda", "-1"],
    ["classify", "--family", "pure-tri", "--a", "1", "--b", "0.5", "--c", "0.5"],
])  # fmt: skip
def test_invalid_inputs_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_work_standard_average_verdict(capsys):
    code, out, _ = run(capsys, "work", "--family", "standard", "--a", "2", "--b", "2", "--c", "1", "--d", "0",
                       "--lambda", "3", "--average")  # fmt: skip
    info = last_json(out)
    assert code == 0 and info["averaged"] and info["witness"] == "undetected"
    code, out, _ = run(capsys, "work", "--family", "standard", "--a", "2", "--b", "2", "--c", "1", "--d", "0", "--lambda", "3")
    assert last_json(out)["witness"] is None and "note" in last_json(out)


def test_work_tripartite_and_two_measurements(capsys):
    code, out, _ = run(capsys, "work", "--family", "sym-pure-tri", "--a", "2", "--lambda", "0.4", "--phi", "1",
                       "--lambda-c", "3")  # fmt: skip
    info = last_json(out)
    assert info["W"] == pytest.approx(math.log(4), abs=1e-9) and info["ppt"]["class"] == "i"
    code, out, _ = run(capsys, "work", "--family", "sym-sts", "--a", "3", "--c", "2", "--lambda", "1", "--lambda-a", "1")
    assert last_json(out)["W"] == pytest.approx(math.log(49 / 33), abs=1e-12)
    assert run(capsys, "work", "--family", "sym-pure-tri", "--a", "2", "--lambda-a", "1")[0] == 2


def test_work_quadrature_failure_exits_3(capsys, monkeypatch):
    monkeypatch.setattr(work_mod, "MAX_NODES", 8)
    code, _, err = run(capsys, "work", "--family", "standard", "--a", "2", "--b", "3", "--c", "1", "--d", "0.5",
                       "--lambda", "3", "--average")  # fmt: skip
    assert code == 3 and "quadrature" in err


def test_classify_family_and_matrix_files(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--family", "pure-tri", "--a", "1", "--b", "1", "--c", "1")
    assert code == 0 and json.loads(out)["class"] == "i"
    code, out, _ = run(capsys, "classify", "--family", "pure-tri", "--a", "1", "--b", "1", "--c", "0.5")
    assert json.loads(out)["class"] == "ii"
    path = tmp_path / "m.txt"
    np.savetxt(path, standard_form_matrix(3, 3, 2.8, -2.8))
    code, out, _ = run(capsys, "classify", "--matrix", str(path))
    assert code == 0 and json.loads(out)["label"] == "entangled"
    jpath = tmp_path / "m.json"
    jpath.write_text(json.dumps(build_symmetric_pure_tripartite(1.0).tolist()))
    assert json.loads(run(capsys, "classify", "--matrix", str(jpath))[1])["label"] == "i"
    bad = tmp_path / "bad.txt"
    np.savetxt(bad, 0.3 * np.eye(4))
    code, _, err = run(capsys, "classify", "--matrix", str(bad))
    assert code == 2 and "symplectic eigenvalue" in err
    assert run(capsys, "classify", "--matrix", str(path), "--family", "sts")[0] == 2


def test_work_from_matrix(capsys, tmp_path):
    path = tmp_path / "m.txt"
    np.savetxt(path, standard_form_matrix(3, 3, 2, -2))
    code, out, _ = run(capsys, "work", "--matrix", str(path), "--lambda", "1")
    info = last_json(out)
    assert info["W"] == pytest.approx(math.log(21 / 13)) and info["W_sep"] is None


def test_scatter_cli_and_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"figure": "fig2b", "samples": 20, "seed": 5}))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "scatter", "--config", str(cfg), "--out", str(out1))[0] == 0
    assert run(capsys, "scatter", "--figure", "fig2b", "--samples", "20", "--seed", "5", "--out", str(out2), "--workers", "2")[0] == 0
    assert out1.read_bytes() == out2.read_bytes()
    code, out, _ = run(capsys, "scatter", "--family", "sts", "--samples", "3", "--lambda", "0", "1", "--range", "b", "0.5", "1")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 7
    assert run(capsys, "scatter", "--figure", "nope")[0] == 2


def test_sweep_cli(capsys, tmp_path):
    code, out, _ = run(capsys, "sweep", "fig2c", "--points", "5")
    assert code == 0 and out.splitlines()[0] == "curve,x,W" and len(out.splitlines()) == 16
    code, out, _ = run(capsys, "sweep", "--family", "sym-sts", "--vary", "c", "--range", "0", "2", "--a", "3", "--points", "3",
                       "--lambda", "1")  # fmt: skip
    assert code == 0 and len(out.splitlines()) == 4
    assert run(capsys, "sweep", "--family", "sym-sts", "--vary", "c", "--range", "0", "3", "--a", "3")[0] == 2
    assert run(capsys, "sweep")[0] == 2
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"family": "sts", "vary": "b", "range": [1, 2], "params": {"a": 2, "c": 0.5}, "points": 4}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == 0 and len(out.splitlines()) == 5


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gausswork", "work", "--family", "sym-sts", "--a", "3", "--c", "2"],
                         capture_output=True, text=True)  # fmt: skip
    assert res.returncode == 0 and "verdict: separable" in res.stdout
