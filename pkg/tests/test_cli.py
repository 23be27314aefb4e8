import json

import pytest

from quditrb import cli
from quditrb.group import read_group_cache

SPEC = """\
[experiment]
d = 3
n = 1
max_length = 8
num_sequences = 6
num_shots = 200
seed = 3
mode = sampled

[noise]
kind = depolarizing
p = 0.9
"""


def write_spec(tmp_path, text=SPEC, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_run_end_to_end(tmp_path, capsys):
    spec = write_spec(tmp_path)
    out = tmp_path / "results"
    assert cli.main(["run", str(spec), "--out", str(out)]) == 0
    captured = capsys.readouterr().out.splitlines()

    assert (out / "dataset.json").exists()
    assert (out / "dataset.csv").exists()
    assert (out / "fit.json").exists()
    assert not (out / "decay.svg").exists()

    fit = json.loads((out / "fit.json").read_text())
    assert fit["schema"] == 1
    assert set(fit) >= {"p", "a0", "b0", "error_rate", "average_fidelity",
                        "residual_rms", "iterations", "converged", "covariance"}
    assert len(fit["covariance"]) == 3 and len(fit["covariance"][0]) == 3
    assert 0.0 < fit["p"] < 1.0
    assert fit["average_fidelity"] == 1.0 - fit["error_rate"]

    # the last stdout line is the bare error rate, machine readable
    assert float(captured[-1]) == fit["error_rate"]
    assert any(line.startswith("fitted decay:") for line in captured)
    assert sum(line.startswith("wrote ") for line in captured) == 3

    dataset = json.loads((out / "dataset.json").read_text())
    assert dataset["config"]["seed"] == 3
    assert dataset["provenance"]["gate_source"] == "table"
    header = (out / "dataset.csv").read_text().splitlines()[0]
    assert header == "length,seq_index,survival,shots"


def test_run_overrides(tmp_path, capsys):
    spec = write_spec(tmp_path)
    out = tmp_path / "results"
    code = cli.main(["run", str(spec), "--out", str(out), "--seed", "11", "--exact", "--threads", "2"])
    assert code == 0
    capsys.readouterr()
    dataset = json.loads((out / "dataset.json").read_text())
    assert dataset["config"]["seed"] == 11
    assert dataset["config"]["num_shots"] is None
    assert dataset["records"][0]["shots"] is None


def test_run_emit_plot_deterministic(tmp_path, capsys):
    spec = write_spec(tmp_path)
    for name in ("a", "b"):
        assert cli.main(["run", str(spec), "--out", str(tmp_path / name), "--emit-plot"]) == 0
    capsys.readouterr()
    svg_a = (tmp_path / "a" / "decay.svg").read_bytes()
    svg_b = (tmp_path / "b" / "decay.svg").read_bytes()
    assert svg_a.startswith(b"<?xml")
    assert svg_a == svg_b
    assert (tmp_path / "a" / "dataset.json").read_bytes() == (tmp_path / "b" / "dataset.json").read_bytes()


@pytest.mark.parametrize("suite", ["cardinality", "design", "counterexample"])
def test_verify_suites_pass(suite, capsys):
    assert cli.main(["verify", suite]) == 0
    out = capsys.readouterr().out
    assert f"suite {suite!r} passed" in out
    assert "FAIL" not in out
    assert "ok  " in out


def test_verify_design_seed_flag(capsys):
    assert cli.main(["verify", "design", "--seed", "5"]) == 0
    capsys.readouterr()


def test_verify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(cli, "clifford_group_order", lambda d, n: 999)
    assert cli.main(["verify", "cardinality"]) == 3
    captured = capsys.readouterr()
    assert "FAIL" in captured.out
    assert "verification failed" in captured.err


def test_enumerate_with_cache(tmp_path, capsys):
    cache = tmp_path / "c31.qrbg"
    assert cli.main(["enumerate", "3", "1", "--cache", str(cache)]) == 0
    out = capsys.readouterr().out
    assert "216 elements" in out
    assert cache.exists()
    assert len(read_group_cache(cache)) == 216


def test_usage_errors_exit_2(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "missing.ini")]) == 2
    assert cli.main(["run", str(write_spec(tmp_path, SPEC.replace("d = 3", "d = 4")))]) == 2
    assert cli.main(["enumerate", "4", "1"]) == 2
    assert cli.main(["enumerate", "2", "3", "--max-size", "100"]) == 2
    err = capsys.readouterr().err
    assert err.count("error:") == 4

    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == 2


def test_unfittable_data_exits_1(tmp_path, capsys):
    text = """\
[experiment]
d = 3
n = 1
max_length = 8
num_sequences = 5
mode = exact

[noise]
kind = depolarizing
p = 1.0
"""
    spec = write_spec(tmp_path, text, name="flat.ini")
    assert cli.main(["run", str(spec), "--out", str(tmp_path / "out")]) == 1
    assert "error:" in capsys.readouterr().err
