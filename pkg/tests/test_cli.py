import io as _io
import json
import subprocess
import sys

import numpy as np
import pytest

from psdkit import cli, io, schur

BELL = [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]]


def run(*argv):
    out, err = _io.StringIO(), _io.StringIO()
    code = cli.dispatch([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


def test_check_identity(tmp_path):
    code, out, _ = run("check", write(tmp_path, "id2.json", [[1, 0], [0, 1]]))
    assert code == 0 and json.loads(out)["is_psd"] is True


def test_check_all_methods_indefinite(tmp_path):
    code, out, _ = run("check", write(tmp_path, "m.json", [[1, 2], [2, 1]]), "--method", "all")
    report = json.loads(out)
    assert code == 1 and not report["is_psd"]
    assert report["verdicts"]["p2"]["witness"] == pytest.approx(-1)
    assert set(report["verdicts"]) == {"p2", "p3", "p4", "p5", "p6"}


def test_schur_extract_indefinite_gives_witness(tmp_path):
    code, out, _ = run("schur", "extract", write(tmp_path, "bad.json", [[1, 0.5], [0.5, -1]]))
    report = json.loads(out)
    assert code == 1 and report["is_psd"] is False and report["witness"] < 0


def test_schur_extract_then_reconstruct(tmp_path):
    S = [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]]
    code, out, _ = run("schur", "extract", write(tmp_path, "s.json", S))
    assert code == 0
    params = write(tmp_path, "p.json", out)
    assert io.params_from_obj(json.loads(out)).gamma(0, 1)[0, 0] == pytest.approx(0.5)
    code, out, _ = run("schur", "reconstruct", params)
    assert code == 0 and np.allclose(io.matrix_from_obj(json.loads(out)), S)
    code, out, _ = run("schur", "det", params)
    assert json.loads(out)["det_formula"] == pytest.approx(0.5625)
    code, out, _ = run("schur", "rankone", params)
    assert code == 1 and json.loads(out) == {"rank_one": False, "numerical_rank": 3}


def test_schur_reconstruct_csv(tmp_path):
    p = schur.random_parameters(3, 1, 0)
    path = write(tmp_path, "p.json", io.dumps(io.params_to_obj(p)))
    code, out, _ = run("schur", "reconstruct", path, "--format", "csv")
    assert code == 0 and np.allclose(io.matrix_from_csv(out), schur.reconstruct(p))


def test_bloch_commands(tmp_path):
    code, out, _ = run("bloch", "to-beta", write(tmp_path, "r.json", [[1, 0], [0, 0]]), "--dim", 2)
    assert code == 0 and json.loads(out) == [0.0, 0.0, 1.0]
    beta = write(tmp_path, "b.json", [0.0, 0.0, 1.0])
    assert run("bloch", "pure", beta, "--dim", 2)[0] == 0
    assert run("bloch", "pure", write(tmp_path, "m.json", [0, 0, 0.5]), "--dim", 2)[0] == 1
    code, out, _ = run("bloch", "represent", write(tmp_path, "b0.json", {"beta0": [0.0] * 8}), "--dim", 3)
    report = json.loads(out)
    assert code == 0 and report["psd"] and report["kappa"] == pytest.approx(np.sqrt(3))
    assert run("bloch", "from-beta", beta, "--dim", 1)[0] == 2


def test_channel_commands(tmp_path):
    kraus = {"d_in": 2, "d_out": 2, "ops": [[[1, 0], [0, 0]], [[0, 1], [0, 0]]]}
    code, out, _ = run("channel", "choi", write(tmp_path, "k.json", kraus))
    assert code == 0
    choi = write(tmp_path, "c.json", out)
    code, out, _ = run("channel", "verdicts", choi, "--din", 2, "--dout", 2)
    report = json.loads(out)
    assert code == 0 and report["tp"] and not report["unital"] and report["cp"]["is_psd"]
    code, out, _ = run("channel", "kraus", choi, "--din", 2, "--dout", 2)
    assert code == 0 and len(json.loads(out)["ops"]) == 2
    assert run("channel", "kraus", choi)[0] == 2


def test_channel_non_cp(tmp_path):
    path = write(tmp_path, "t.json", [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    code, out, _ = run("channel", "kraus", path, "--din", 2, "--dout", 2)
    assert code == 1 and json.loads(out)["cp"] is False


def test_toeplitz_commands(tmp_path):
    code, out, _ = run("toeplitz", "ppt", write(tmp_path, "bell.json", BELL), "--d1", 2, "--d2", 2)
    assert code == 1 and json.loads(out)["ppt"] is False
    A = [[2, 0.5, 0.25, 0.1], [0.5, 2, 0.5, 0.25], [0.25, 0.5, 2, 0.5], [0.1, 0.25, 0.5, 2]]
    code, out, _ = run("toeplitz", "ptcheck", write(tmp_path, "a.json", A), "--block", 2)
    report = json.loads(out)
    assert code == 0 and report["permutation_identity"] and report["ppt"] and report["toeplitz"]
    assert run("toeplitz", "ppt", write(tmp_path, "x.json", BELL))[0] == 2


def test_relax_commands(tmp_path):
    eq = write(tmp_path, "eq.json", {"Gamma_d": dict.fromkeys(["12", "13", "14", "23", "24", "34"], 1.0)})
    code, out, _ = run("relax", "check4", "--rates", eq)
    assert code == 0 and json.loads(out)["verdict"] is True
    bad = write(tmp_path, "bad.json", {"Gamma_d": {"12": 0, "13": 1, "14": 0, "23": 0, "24": 1, "34": 0}})
    code, out, _ = run("relax", "check4", "--rates", bad)
    assert code == 1 and json.loads(out)["b"][0][0] == -1
    ld = write(tmp_path, "ld.json", {"gamma": {"12": 0.3}, "Gamma_d": {"12": 0.8}})
    code, out, _ = run("relax", "ld", "--rates", ld, "--levels", 2)
    L = io.matrix_from_obj(json.loads(out)).real
    assert code == 0 and L[0, 3] == 0.3 and L[1, 1] == -0.8
    neg = write(tmp_path, "neg.json", {"Gamma_d": {"12": -1, "13": 1, "14": 0, "23": 0, "24": 1, "34": 0}})
    assert run("relax", "check4", "--rates", neg)[0] == 2


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    [],
    ["check"],
    ["check", "x.json", "--tol", "-1"],
    ["schur", "extract", "x.json", "--block", "0"],
])
def test_usage_errors(argv):
    code, out, err = run(*argv)
    assert code == 2 and out == "" and "usage error" in err


def test_missing_file_is_io_error(tmp_path):
    code, _, err = run("check", tmp_path / "nope.json")
    assert code == 2 and err


def test_tolerance_from_environment(tmp_path, monkeypatch):
    path = write(tmp_path, "m.json", [[1, 0], [0, -1e-6]])
    assert run("check", path)[0] == 1
    monkeypatch.setenv("PSDKIT_TOL", "1e-3")
    assert run("check", path)[0] == 0
    assert run("check", path, "--tol", "1e-10")[0] == 1
    monkeypatch.setenv("PSDKIT_TOL", "abc")
    assert run("check", path)[0] == 2


def test_residual_failure_exit_code(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise schur.ResidualError("inconsistent residual")
    monkeypatch.setattr(schur, "extract", boom)
    code, _, err = run("schur", "extract", write(tmp_path, "s.json", [[1]]))
    assert code == 3 and "numerical failure" in err


def test_console_script_selftest():
    proc = subprocess.run([sys.executable, "-m", "psdkit.cli", "selftest", "--seed", "7"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["pass"] and report["seed"] == 7
