import json
import os
import subprocess
import sys

import numpy as np
import pytest

from torus_olp import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_darboux_worked_preset(capsys):
    code, out, _ = run(capsys, "darboux", "--preset", "paper-3.5", "--k", "1")
    assert code == 0
    data = json.loads(out)
    coeffs = np.array(data["coefficients"]["re"]) + 1j * np.array(data["coefficients"]["im"])
    assert np.allclose(coeffs[:, 0], -0.2)
    assert np.allclose(coeffs[:, 1:], np.eye(4))
    assert data["rows"] == [[-1, 0], [0, -1], [0, 1], [1, 0]]


def test_outputs_are_deterministic(capsys):
    first = run(capsys, "darboux", "--preset", "worked-example", "--k", "2", "--seed", "5")[1]
    second = run(capsys, "darboux", "--preset", "worked-example", "--k", "2", "--seed", "5")[1]
    assert first == second


def test_floats_have_seventeen_digits():
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert cli.dumps({"b": 1, "a": [1.5, 2]}) == '{\n "a": [1.5, 2],\n "b": 1\n}'
    assert cli.dumps(1 + 2j) == '{\n "im": 2,\n "re": 1\n}'


def test_nice_text_and_json(capsys):
    code, out, _ = run(capsys, "nice", "--poly", "z1^-2 + z2^-2 + 1")
    data = json.loads(out)
    assert code == 0 and data["nice"] is False and data["deficient_signs"] == ["++"]
    poly = {"terms": [{"alpha": [-2, 0], "re": 1}, {"alpha": [2, 0], "re": 1}, {"alpha": [0, 1], "re": 1}]}
    data = json.loads(run(capsys, "nice", "--poly", json.dumps(poly))[1])
    assert data["nice"] is True and data["oracle_agrees"] is True


def test_basis_and_moments(capsys):
    data = json.loads(run(capsys, "basis", "--D", "2", "--K", "3")[1])
    assert data["dimension"] == 13 and data["shells"][1]["exponents"][0] == [-1, 0]
    code, out, _ = run(capsys, "moments", "--preset", "worked-example", "--K", "2", "--format", "csv")
    assert code == 0 and out.splitlines()[1] == "0,0,0,0,5,0"


def test_factorize_and_eval(capsys):
    data = json.loads(run(capsys, "factorize", "--preset", "haar", "--D", "1", "--K", "3")[1])
    assert data["levels"] == 3 and data["reconstruction_residual"] == 0
    data = json.loads(run(capsys, "eval", "--preset", "haar", "--K", "2", "--z", "2,0.5j")[1])
    vals = np.array(data["points"][0]["values"]["re"]) + 1j * np.array(data["points"][0]["values"]["im"])
    assert np.allclose(vals, [1, 0.5, -2j, 0.5j, 2])


def test_plot_data(capsys):
    code, out, _ = run(capsys, "kernel", "--preset", "worked-example", "--K", "3", "--plot-data", "--samples", "8")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "t,re,im" and len(lines) == 9
    code, out, _ = run(capsys, "eval", "--preset", "haar", "--K", "2", "--plot-data", "--samples", "4", "--direction", "1,2")
    assert out.splitlines()[0].startswith("t,re_+0+0,im_+0+0")


def test_kernel_point(capsys):
    data = json.loads(run(capsys, "kernel", "--preset", "worked-example", "--K", "3", "--z1", "0.9,1j", "--z2", "1.1j,-1")[1])
    assert data["abc_residual"] < 1e-13


def test_toda_checks(tmp_path, capsys):
    times = tmp_path / "t.json"
    times.write_text('[{"alpha": [1, 0], "re": 0.1}, {"alpha": [-1, 0], "re": 0.1}]')
    for check, tol in (("first", 1e-7), ("lax", 1e-5), ("zs", 1e-5), ("discrete", 1e-9), ("miwa", 1e-8)):
        code, out, _ = run(capsys, "toda", "--preset", "worked-example", "--K", "3", "--times", str(times), "--check", check)
        assert code == 0 and json.loads(out)["max_residual"] < tol


def test_weight_file_and_config(tmp_path, capsys):
    w = tmp_path / "w.json"
    w.write_text('{"exp_times": [{"alpha": [0, 1], "re": 0.2}, {"alpha": [0, -1], "re": 0.2}]}')
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"K": 3, "weight": str(w), "output": str(tmp_path) + os.sep}))
    assert run(capsys, "factorize", "--config", str(cfg))[0] == 0
    data = json.loads((tmp_path / "factorize.json").read_text())
    assert data["levels"] == 3


def test_errors_are_structured(capsys):
    code, _, err = run(capsys, "factorize", "--K", "1")
    assert code == 1
    assert json.loads(err)["error"]["type"] == "ValueError"
    code, _, err = run(capsys, "darboux", "--poly", "z1^-2 + z2^-2 + 1")
    assert code == 1 and "not nice" in json.loads(err)["error"]["message"]


def test_verify_subset(capsys, tmp_path):
    code, out, err = run(capsys, "verify", "--preset", "haar", "--D", "2", "--K", "4", "--only", "1,2,7")
    data = json.loads(out)
    assert code == 0 and data["passed"] and len(data["criteria"]) == 3
    assert err.count("[PASS]") == 4


def test_module_entry_point_and_thread_cap():
    env = dict(os.environ, TORUS_OLP_THREADS="1")
    proc = subprocess.run(
        [sys.executable, "-c", "import os, torus_olp.cli; print(os.environ['OPENBLAS_NUM_THREADS'])"],
        env={k: v for k, v in env.items() if k != "OPENBLAS_NUM_THREADS"},
        capture_output=True,
        text=True,
    )
    assert proc.stdout.strip() == "1"
    proc = subprocess.run([sys.executable, "-m", "torus_olp", "basis", "--D", "1", "--K", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["dimension"] == 3


@pytest.mark.parametrize("argv", [["eval", "--preset", "haar"], ["kernel", "--preset", "haar", "--z1", "1,1"]])
def test_missing_points(capsys, argv):
    assert run(capsys, *argv)[0] == 1
