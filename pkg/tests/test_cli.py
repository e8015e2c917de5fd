import json
import subprocess
import sys

import numpy as np
import pytest

from binarycs.cli import main, read_measurements, write_measurements
from binarycs.matrix import DeVoreMatrix
from binarycs.sparse import SparseVector

X_JSON = '{"n": 2000, "entries": [[3, 1.5], [1234, -2.25], [1999, 7.0]]}'


def test_plan_feasible(capsys):
    assert main(["plan", "--n", "20000", "--k", "6"]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "method,q,m,feasible", "l1,37,1369,true", "expander,89,7921,true", "new,29,841,true"]


def test_plan_infeasible_exit_code(capsys):
    assert main(["plan", "--n", "20000", "--k", "9"]) == 2
    out = capsys.readouterr()
    assert "expander,137,18769,false" in out.out and "exceed" in out.err


def test_build_matrix_and_verify(tmp_path, capsys):
    path = tmp_path / "a.csv"
    assert main(["build-matrix", "--q", "7", "--r", "3", "--n", "300", "--out", str(path)]) == 0
    assert DeVoreMatrix.load_csv(path).n == 300
    capsys.readouterr()
    assert main(["verify", "--matrix", str(path), "--exhaustive"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["violations"] == 0 and rep["max_inner_product"] <= 2


def test_verify_refuses_large_exhaustive(capsys):
    assert main(["verify", "--matrix", "q=29,r=3,n=20000", "--exhaustive"]) == 1


@pytest.mark.parametrize("method", ["new", "expander", "bp"])
def test_encode_decode_round_trip(tmp_path, method):
    y_path, x_path = tmp_path / "y.csv", tmp_path / "x.json"
    spec = {"new": "q=13,r=3,n=2000", "expander": "q=41,r=3,n=2000", "bp": "q=29,r=3,n=2000"}[method]
    assert main(["encode", "--matrix", spec, "--x", X_JSON, "--out", str(y_path)]) == 0
    args = ["decode", "--method", method, "--matrix", spec, "--y", str(y_path), "--out", str(x_path)]
    if method == "bp":
        args += ["--tol", "1e-6"]
    assert main(args) == 0
    got = SparseVector.from_json(x_path.read_text())
    want = SparseVector.from_json(X_JSON)
    assert got.support == want.support
    assert np.allclose(got.to_dense(), want.to_dense(), atol=1e-6)


def test_encode_reads_json_file(tmp_path):
    xf = tmp_path / "x.json"
    xf.write_text(X_JSON)
    out = tmp_path / "y.csv"
    assert main(["encode", "--matrix", "q=13,n=2000", "--x", str(xf), "--out", str(out)]) == 0
    assert read_measurements(out).size == 169


def test_decode_failure_exit_code(tmp_path):
    y = tmp_path / "y.csv"
    write_measurements(np.arange(1, 50, dtype=float), y)
    assert main(["decode", "--matrix", "q=7,r=3", "--y", str(y)]) == 3
    assert main(["decode", "--method", "expander", "--matrix", "q=7,r=3", "--y", str(y)]) == 3


def test_decode_length_mismatch(tmp_path):
    y = tmp_path / "y.csv"
    write_measurements(np.zeros(10), y)
    assert main(["decode", "--matrix", "q=7,r=3", "--y", str(y)]) == 1


def test_measurement_io_round_trip(tmp_path):
    y = np.random.default_rng(0).standard_normal(25)
    write_measurements(y, tmp_path / "y.csv")
    assert np.array_equal(read_measurements(tmp_path / "y.csv"), y)


def test_bench(tmp_path, capsys):
    out = tmp_path / "res.csv"
    spec = json.dumps({"n": 125, "k": 1, "trials": 3, "methods": ["new"], "out": str(out)})
    assert main(["bench", "--spec", spec]) == 0
    assert out.read_text().splitlines()[0] == "trial,method,exact,l2_err,linf_err,support_match,time_ms,iters"
    summary = json.loads(capsys.readouterr().err)
    assert summary[0]["exact"] == 3


def test_bench_infeasible():
    assert main(["bench", "--spec", '{"n": 20000, "k": 9, "methods": ["expander"]}']) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "binarycs", "plan", "--n", "20000", "--k", "6", "--M", "6"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "new,37,1369,true" in proc.stdout
