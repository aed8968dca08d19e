import json
from pathlib import Path

import pytest

from arithlc.cli import main

ROOT = Path(__file__).resolve().parent.parent
DEMO = ROOT / "scripts" / "configs" / "demo.ini"
GOLDEN = ROOT / "tests" / "golden" / "demo_seed7.json"


def _write(tmp_path, text):
    path = tmp_path / "job.ini"
    path.write_text(text)
    return str(path)


def test_demo_matches_golden(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--config", str(DEMO), "--seed", "7", "--report", str(out)]) == 0
    assert out.read_bytes() == GOLDEN.read_bytes()


def test_parallel_run_is_identical(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--config", str(DEMO), "--seed", "7", "--jobs", "3", "--report", str(out)]) == 0
    assert out.read_bytes() == GOLDEN.read_bytes()


def test_report_shape():
    doc = json.loads(GOLDEN.read_text())
    assert doc["seed"] == 7 and doc["engine"].startswith("arithlc ")
    for job in doc["jobs"]:
        assert job["status"] == "pass"
        for check in job["checks"]:
            assert set(check) == {"name", "anchor", "status", "witness", "timing"}
    n1 = next(j for j in doc["jobs"] if j["name"] == "solve-n1")
    assert n1["values"]["lambda_at_identity"] == [["8 mod 7^2"]]


@pytest.mark.parametrize("body, fragment", [
    ("[a]\ncommand = solve\np = 2\nmetric = [[1]]\n", "[a] field 'p'"),
    ("[a]\ncommand = solve\np = 9\nmetric = [[1]]\n", "[a] field 'p'"),
    ("[a]\ncommand = solve\nmetric = [[1]]\n", "missing field 'p'"),
    ("[a]\ncommand = fly\np = 3\n", "[a] command"),
    ("[a]\ncommand = solve\np = 3\nmetric = [[1, 2], [3, 1]]\n", "not symmetric"),
    ("[a]\ncommand = solve\np = 3\nmetric = [[1, 2]\n", "[a] metric"),
    ("[a]\ncommand = christoffel\np = 3\nN = 1\nmetric = [[1]]\n", "[a] N"),
    ("[a]\ncommand = mixed-trace\nprimes = 3\n", "[a] primes"),
    ("[a]\ncommand = solve\np = 5\nfield = cyclotomic\nm = 5\nmetric = [[1]]\n", "conductor"),
])
def test_config_errors_exit_2(tmp_path, capsys, body, fragment):
    assert main(["--config", _write(tmp_path, body)]) == 2
    assert fragment in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "nope.ini")]) == 2


def test_non_unit_metric_is_a_check_failure(tmp_path, capsys):
    path = _write(tmp_path, "[a]\ncommand = solve\np = 3\nmetric = [[3]]\n")
    assert main(["--config", path]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["jobs"][0]["checks"][0]["status"] == "error"
    assert "NotAUnit" in doc["jobs"][0]["checks"][0]["witness"]


def test_seed_controls_points(tmp_path, capsys):
    body = "[a]\ncommand = solve\np = 3\nN = 2\nmetric = [[1, 0, 0], [0, 2, 0], [0, 0, 1]]\npoints = 5\n"
    path = _write(tmp_path, body)
    assert main(["--config", path, "--seed", "1"]) == 0
    first = capsys.readouterr().out
    assert main(["--config", path, "--seed", "1"]) == 0
    assert capsys.readouterr().out == first


def test_bad_seed(tmp_path):
    path = _write(tmp_path, "[a]\ncommand = determinant\nn = 2\n")
    assert main(["--config", path, "--seed", "-1"]) == 2


def test_precision_key_is_honoured(tmp_path, capsys):
    path = _write(tmp_path, "[a]\ncommand = solve\np = 7\nN = 3\nmetric = [[2]]\n")
    assert main(["--config", path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["jobs"][0]["values"]["lambda_at_identity"][0][0].endswith("mod 7^3")
