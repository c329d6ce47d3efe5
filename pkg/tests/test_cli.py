import csv
import io
import json

import pytest

from epspy import main as cli
from epspy.errors import NumericalFailure


@pytest.fixture(autouse=True)
def _clear_seed_env(monkeypatch):
    monkeypatch.delenv("EPSPY_SEED", raising=False)


def _run(*argv: str) -> int:
    return cli.main(list(argv))


def test_table1_writes_csv(tmp_path, capsys):
    out = tmp_path / "table1.csv"
    code = _run("table1", "--theta", "1", "--eps", "0.1", "--n", "100", "--seed", "3", "--out", str(out))
    assert code == 0
    printed = capsys.readouterr().out
    assert "TABLE 1" in printed
    assert "EXPERIMENT COMPLETE" in printed
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 1
    assert rows[0]["theta"] == "1.0"
    assert "dK" in rows[0] and "Ex_median" in rows[0]


def test_same_seed_same_bytes(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert _run("sample-approx", "--theta", "1", "--eps", "0.1", "--n", "20", "--seed", "9",
                    "--out", str(path), "--quiet") == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_stdout_holds_only_data(capsys):
    code = _run("tau-dist", "--theta", "1", "--eps", "0.1", "--n", "5", "--seed", "1", "--out", "-")
    assert code == 0
    captured = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(captured.out)))
    assert len(rows) == 5
    assert "EXPERIMENT COMPLETE" in captured.err


def test_json_format(tmp_path):
    out = tmp_path / "ts.json"
    assert _run("tilted-stable", "--theta", "1", "--n", "4", "--format", "json", "--out", str(out), "--quiet") == 0
    records = json.loads(out.read_text())
    assert len(records) == 4
    assert set(records[0]) == {"alpha", "theta", "replication", "t"}


def test_config_file(tmp_path):
    settings = tmp_path / "settings.json"
    settings.write_text('{"thetas": [2.0], "epsilons": [0.2], "replications": 3, "seed": 4}')
    out = tmp_path / "tau.csv"
    assert _run("tau-dist", "--config", str(settings), "--out", str(out), "--quiet") == 0
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 3
    assert {r["theta"] for r in rows} == {"2.0"}


@pytest.mark.parametrize(
    "argv",
    [
        ("table1", "--seed", "-1"),
        ("table2", "--alpha", "0.3"),
        ("sample-exact", "--theta", "-0.7"),
        ("tau-dist", "--config", "/nonexistent/settings.yaml"),
        ("fig1", "--bins", "0"),
    ],
)
def test_config_errors_exit_2(argv, capsys):
    assert _run(*argv, "--quiet") == 2
    assert capsys.readouterr().err.startswith("ERROR:")


def test_env_seed_error_exit_2(monkeypatch, capsys):
    monkeypatch.setenv("EPSPY_SEED", "not-a-seed")
    assert _run("tau-dist", "--quiet") == 2
    assert "EPSPY_SEED" in capsys.readouterr().err


def test_numerical_failure_exit_3(monkeypatch, tmp_path, capsys):
    def fail(config, progress=None):
        raise NumericalFailure("rejection sampler exceeded its iteration cap")

    monkeypatch.setattr(cli, "run_experiment", fail)
    assert _run("tau-dist", "--out", str(tmp_path / "x.csv"), "--quiet") == 3
    assert "iteration cap" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_unknown_experiment_is_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        _run("table9")
    assert excinfo.value.code == 2
