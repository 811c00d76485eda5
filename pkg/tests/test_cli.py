import csv
import io
import json

import numpy as np
import pytest

from dmu.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    lines = out.getvalue().splitlines()
    meta = dict(line[2:].split(": ", 1) for line in lines if line.startswith("# "))
    rows = list(csv.DictReader(line for line in lines if not line.startswith("#")))
    return code, meta, rows, err.getvalue()


LEBESGUE = json.dumps({"density": {"kind": "uniform"}})
DIRAC = json.dumps({"atoms": [{"theta": 0.0, "mass": 1.0}]})
POINT = json.dumps({"kind": "finite", "points": [0.0]})


def test_kernel_command():
    code, meta, rows, _ = call("kernel", "--measure", LEBESGUE, "--z", "0.9", "--order", "256")
    assert code == 0
    assert meta["command"] == "kernel" and meta["version"].startswith("dmu 0.1.0")
    assert len(meta["measure_sha256"]) == 16
    row = rows[0]
    np.testing.assert_allclose(float(row["estimate"]), 1 + np.log(5.5), rtol=1e-9)
    n = np.arange(257)
    np.testing.assert_allclose(float(row["oracle"]), np.sum(0.81 ** n / (1 + n)), rtol=1e-9)
    assert 0.25 <= float(row["ratio"]) <= 4


def test_kernel_reads_measure_files(tmp_path):
    path = tmp_path / "mu.json"
    path.write_text(DIRAC)
    code, _, rows, _ = call("kernel", "--measure", str(path), "--z", "0.5+0.5j",
                            "--method", "estimate", "--out", str(tmp_path / "o.csv"))
    assert code == 0 and rows == []
    text = (tmp_path / "o.csv").read_text()
    assert "estimate" in text and "oracle" not in text.split("\n")[-2]


def test_capacity_command():
    code, meta, rows, _ = call("capacity", "--measure", LEBESGUE, "--arc", "0,0.1",
                               "--order", "1024")
    assert code == 0
    assert 1 / 16 <= float(rows[0]["ratio"]) <= 16
    code, _, rows, _ = call("capacity", "--measure", LEBESGUE, "--set", POINT,
                            "--method", "oracle", "--order", "1024")
    assert code == 0 and float(rows[0]["qp"]) > 0


def test_polar_command():
    code, _, rows, _ = call("polar", "--measure", LEBESGUE, "--set", POINT, "--psi", "t/pi")
    assert code == 0 and rows[0]["polar"] == "true"
    code, _, rows, _ = call("polar", "--measure", DIRAC, "--set", POINT)
    assert code == 2 and rows[0]["polar"] == "inconclusive"


def test_sobolev_command():
    code, meta, rows, _ = call("sobolev", "--phi", "x", "--a", "0.0625", "--a", "0.001")
    assert code == 0 and meta["phi"] == "x"
    np.testing.assert_allclose(float(rows[0]["estimate"]), 1 + np.log(2 * np.pi / 0.0625),
                               rtol=1e-9)
    assert all(0.25 <= float(r["ratio"]) <= 4 for r in rows)


def test_verify_command():
    code, meta, rows, _ = call("verify", "--suite", "harmonic")
    assert code == 0 and meta["suite"] == "harmonic"
    assert len(rows) == 15


@pytest.mark.parametrize("argv", [
    ["kernel", "--measure", "{not json"],
    ["kernel", "--measure", "/no/such/file.json"],
    ["kernel", "--measure", LEBESGUE, "--z", "1.5"],
    ["kernel", "--measure", LEBESGUE, "--method", "qp"],
    ["capacity", "--measure", LEBESGUE],
    ["capacity", "--measure", LEBESGUE, "--arc", "0,2"],
    ["sobolev", "--phi", "x^^2"],
    ["kernel", "--measure", LEBESGUE, "--jobs", "0"],
    ["nonsense"],
])
def test_errors_exit_with_status_one(argv):
    code, _, _, err = call(*argv)
    assert code == 1
    assert "Traceback" not in err


def test_precision_environment_variable(monkeypatch):
    monkeypatch.setenv("DMU_PRECISION", "1e-2")
    code, _, _, err = call("kernel", "--measure", LEBESGUE)
    assert code == 1 and "DMU_PRECISION" in err
    monkeypatch.setenv("DMU_PRECISION", "1e-8")
    code, meta, _, _ = call("kernel", "--measure", LEBESGUE, "--method", "estimate")
    assert code == 0 and "rtol=1e-08" in meta["tolerances"]
