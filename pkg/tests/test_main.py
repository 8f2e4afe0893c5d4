import csv
import json
import pytest

import engines.eulerprod as eulerprod

from main import main
from settings import settings

def _rows(path):
    with path.open(newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))

def _error(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])

def test_sums_writes_decay_table(tmp_path):
    assert main(["sums", "--ell", "1", "--x", "1000", "--source", "delta", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "sums_ell1.csv")
    assert len(rows) == 1
    assert list(rows[0]) == ["x", "S", "S_over_x", "S_norm_1_7"]
    summary = json.loads((tmp_path / "sums_summary.json").read_text(encoding="utf-8"))
    assert summary["command"] == "sums"
    assert summary["calibration"]["L_hat"] > 0
    assert summary["exponents"] == {"cutoff": 1 / 16, "sieve_level": 1 / 64, "decay": 1 / 7,
                                    "mertens_decay": 1 / 6, "lemma41_power": 1 / 18}

def test_sums_on_stub_table(tmp_path):
    assert main(["sums", "--source", "ones", "--x", "100,1000", "--ell", "1,2", "--out", str(tmp_path)]) == 0
    for ell in (1, 2):
        rows = _rows(tmp_path / f"sums_ell{ell}.csv")
        assert [float(row["S_over_x"]) for row in rows] == [1.0, 1.0]

def test_json_output(tmp_path):
    assert main(["sums", "--source", "ones", "--format", "json", "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "sums_ell1.json").read_text(encoding="utf-8"))
    assert rows[0]["S"] == 1000.0

def test_sieve_weights_and_audit(tmp_path):
    assert main(["sieve", "--z", "5", "--level", "10", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "sieve_summary.json").read_text(encoding="utf-8"))
    assert summary["results"]["weights"]["weights"] == {"1": 1, "2": -1}
    assert summary["results"]["audit"]["passed"]
    assert [(row["d"], row["weight"]) for row in _rows(tmp_path / "sieve.csv")] == [("1", "1"), ("2", "-1")]

def test_sieve_level_must_exceed_one(tmp_path, capsys):
    assert main(["sieve", "--source", "ones", "--x", "1", "--z", "5", "--out", str(tmp_path)]) == 2
    error = _error(capsys)
    assert error["error"] == "ConfigError"

def test_euler_ab_scan(tmp_path):
    assert main(["euler", "--ab-scan", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "euler_ab_scan.csv")
    reference = rows[0]
    assert reference["label"] == "reference"
    assert float(reference["a"]) == pytest.approx(-1 / 9)
    assert float(reference["b"]) == pytest.approx(1 / 36)
    assert reference["admissible"] == "True"
    assert len(_rows(tmp_path / "euler.csv")) == 8

def test_eigen_dump(tmp_path):
    assert main(["eigen", "--n", "10000", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "eigen.csv")
    assert float(rows[1]["lambda"]) == pytest.approx(-0.530330086, abs=1e-9)
    assert (tmp_path / "eigen_table.txt").read_text(encoding="utf-8").startswith("# shiftsieve-eigen v1")

def test_dirichlet_on_stub(tmp_path):
    assert main(["dirichlet", "--source", "ones", "--q", "4", "--x", "100", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "dirichlet.csv")
    assert [float(row["direct"]) for row in rows] == [25.0, 25.0]

def test_theorem1_experiment(tmp_path):
    assert main(["experiment", "theorem1", "--x", "1000,5000", "--out", str(tmp_path)]) == 0
    assert len(_rows(tmp_path / "theorem1.csv")) == 2
    summary = json.loads((tmp_path / "theorem1_summary.json").read_text(encoding="utf-8"))
    assert "1" in summary["results"]["shifts"]

def test_config_errors_exit_two(tmp_path, capsys):
    assert main(["sums", "--ell", "0", "--out", str(tmp_path)]) == 2
    assert _error(capsys)["exit_code"] == 2
    assert main(["sums", "--source", "file", "--out", str(tmp_path)]) == 2

def test_unparseable_value_is_a_config_error(tmp_path, capsys):
    assert main(["sums", "--x", "ten", "--out", str(tmp_path)]) == 2
    assert _error(capsys)["error"] == "ConfigError"

def test_invalid_engine_result_exits_four(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(eulerprod, "_m_product", lambda table, z: 1.5)
    assert main(["euler", "--x", "1000", "--out", str(tmp_path)]) == 4
    error = _error(capsys)
    assert error["error"] == "ConsistencyError"
    assert error["exit_code"] == 4

def test_missing_prime_exits_two(tmp_path, capsys):
    table = tmp_path / "short.txt"
    table.write_text("# shiftsieve-eigen v1 kind=lambda label=short\n2 0.5\n", encoding="utf-8")
    assert main(["sums", "--source", "file", "--table", str(table), "--x", "100", "--out", str(tmp_path)]) == 2
    assert _error(capsys)["error"] == "FormatError"

def test_capacity_exits_three(tmp_path, capsys):
    assert main(["eigen", "--n", "20000000", "--out", str(tmp_path)]) == 3
    assert _error(capsys)["error"] == "CapacityError"

def test_bad_arguments_exit_two():
    with pytest.raises(SystemExit) as error:
        main(["sums", "--format", "xml"])
    assert error.value.code == 2

def test_theorem1_does_not_depend_on_threads(tmp_path, monkeypatch):
    # small blocks so every sum over the x grid goes through the worker pool
    monkeypatch.setattr(settings, "block_size", 512)
    threads = settings.threads
    one, many = tmp_path / "one", tmp_path / "many"
    flags = ["experiment", "theorem1", "--x", "1000,5000,20000", "--ell", "1,2,3"]
    assert main(flags + ["--threads", "1", "--out", str(one)]) == 0
    assert main(flags + ["--threads", "8", "--out", str(many)]) == 0
    for name in ("theorem1.csv", "theorem1_summary.json"):
        assert (one / name).read_bytes() == (many / name).read_bytes()
    assert settings.threads == threads
