import csv
import io
import json

import numpy as np
import pytest

from distlearn.cli import CSV_COLUMNS, ConfigError, ExperimentConfig, compare_scaling, main, run_experiment
from distlearn.opt.lpio import write_lp
from helpers import random_feasible_lp


def read_rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# generated ")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_compare_normalises_to_mwuemp(tmp_path):
    out, md = tmp_path / "t.csv", tmp_path / "t.md"
    assert main(["compare", "--preset", "small", "--trials", "2", "--out", str(out),
                 "--markdown", str(md)]) == 0
    rows = read_rows(out)
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    by = {r["protocol"]: r for r in rows}
    assert float(by["mwuemp"]["words_vs_mwuemp"]) == 1.0
    assert float(by["naive"]["acc_mean"]) == 1.0
    assert [r["protocol"] for r in rows] == sorted(by)
    assert "| small | mwuemp |" in md.read_text()


def test_single_trial_has_zero_spread():
    rows = run_experiment(ExperimentConfig(protocol="voting,randemp", preset="small", trials=1))
    assert all(r["acc_std"] == 0.0 for r in rows)
    assert all(r["words_vs_mwuemp"] is None for r in rows)


def test_rounds_override():
    rows = run_experiment(ExperimentConfig(protocol="mwu", preset="small", trials=1, rounds=50))
    assert rows[0]["rounds_mean"] == 50.0


def test_rerun_is_byte_identical(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"protocol": "voting,mwu", "preset": "small", "trials": 2, "seed": 4}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_text().splitlines()[1:] == b.read_text().splitlines()[1:]


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"protocol": "voting", "preset": "small", "trials": 3}))
    out = tmp_path / "o.csv"
    assert main(["run", "--config", str(cfg), "--trials", "1", "--out", str(out)]) == 0
    assert read_rows(out)[0]["trials"] == "1"


def test_sweep_dimension():
    cfg = ExperimentConfig(protocol="naive,voting,mwu", preset="small", trials=1, sweep_dim=[3, 6])
    rows = compare_scaling(cfg, ["naive", "voting", "mwu"])
    words = {(r["_sweep"][1], r["protocol"]): r["words_mean"] for r in rows}
    assert words[(6, "naive")] / words[(3, "naive")] == pytest.approx(7 / 4)
    assert words[(6, "voting")] == 7 and words[(3, "voting")] == 4


def test_sweep_size_leaves_fixed_costs_alone():
    cfg = ExperimentConfig(preset="small", trials=1, sweep_size=[100, 200])
    rows = compare_scaling(cfg, ["voting", "mwu"])
    words = {(r["_sweep"][1], r["protocol"]): r["words_mean"] for r in rows}
    assert words[(100, "voting")] == words[(200, "voting")]
    assert words[(100, "mwu")] == words[(200, "mwu")]


def test_generate_then_run(tmp_path):
    assert main(["generate", "--preset", "small", "--out", str(tmp_path / "data")]) == 0
    out = tmp_path / "r.csv"
    assert main(["run", "--data", str(tmp_path / "data"), "--protocol", "naive", "--trials", "1",
                 "--out", str(out)]) == 0
    assert read_rows(out)[0]["words_mean"] == f"{4 * 300:.6f}"


@pytest.mark.parametrize("argv", [
    ["run", "--protocol", "bogus"],
    ["run", "--epsilon", "1.5"],
    ["run", "--trials", "0"],
    ["run", "--preset", "nope"],
    ["run", "--data", "/no/such/file"],
    ["sweep", "--sweep-dim", "5,3"],
    ["sweep", "--sweep-dim", "a,b"],
    ["lp"],
    ["run", "--protocol", "lp_mwu", "--preset", "small"],
    ["run", "--rho", "2", "--preset", "small", "--trials", "1"],
    ["run", "--rounds", "0", "--preset", "small", "--trials", "1"],
])
def test_config_errors_exit_2(argv):
    assert main(argv) == 2


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert main(["run", "--config", str(cfg)]) == 2


def test_lp_commands(tmp_path, capsys):
    lp_path = tmp_path / "p.lp"
    write_lp(random_feasible_lp(8, 2, seed=1), lp_path)
    out = tmp_path / "r.csv"
    assert main(["lp", "--data", str(lp_path), "--epsilon", "0.2", "--protocol", "lp_twoparty",
                 "--out", str(out)]) == 0
    z, iters, slack, words = out.read_text().splitlines()[1].split(",")
    assert int(words) == int(iters) * 5 and float(slack) >= -0.2
    assert main(["stream-lp", "--data", str(lp_path), "--parties", "2", "--epsilon", "0.1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["violations"] == report["checked_violations"] <= 0.1 * 8


def test_lp_stream_protocol_uses_streaming_solver(tmp_path, capsys):
    path = tmp_path / "p.lp"
    write_lp(random_feasible_lp(20, 2, seed=3, box=(-1.0, 1.0)), path)
    assert main(["lp", "--data", str(path), "--protocol", "stream_lp", "--epsilon", "0.1"]) == 0
    assert json.loads(capsys.readouterr().out)["checked_violations"] <= 2


def test_runtime_failure_exits_3(tmp_path):
    lp_path = tmp_path / "bad.lp"
    lp_path.write_text("2 1\n1 1.5\n-1 -0.5\n1\n0\n2\n")
    assert main(["lp", "--data", str(lp_path)]) == 3


def test_config_object_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(sweep_size=[0])
    assert ExperimentConfig(protocol="mwu,voting").protocol == ["mwu", "voting"]
    assert np.isclose(ExperimentConfig().epsilon, 0.05)
