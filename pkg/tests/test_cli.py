import json
import os
import subprocess
import sys

import pytest

from intermatch.cli import DEFAULTS, main


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "intermatch", *args], capture_output=True, text=True, cwd=cwd)


def test_defaults_are_the_simulation_parameters():
    assert (DEFAULTS["hospitals"], DEFAULTS["doctors"], DEFAULTS["beta"], DEFAULTS["gamma"]) == (400, 470, 40.0, 20.0)
    assert (DEFAULTS["l"], DEFAULTS["k_min"], DEFAULTS["k_max"], DEFAULTS["reps"]) == (25, 1, 100, 100)


def test_demo_exit_zero_and_deterministic():
    a = run("demo")
    b = run("demo")
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout
    assert "blocking pairs (0)" in a.stdout
    assert "blocking pairs (3)" in a.stdout


def test_demo_json(capsys):
    assert main(["demo", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["matches_expected"]
    assert data["before"]["stable"] and not data["after"]["stable"]
    assert data["after"]["matching"] == [[0, 0], [1, 2], [2, None], [3, 3]]
    assert data["doctors_prefer_before_after_same"] == [2, 0, 2]


def test_single_row_sweep(tmp_path, capsys):
    code = main(["sweep", "--doctors", "20", "--hospitals", "15", "--reps", "1", "--k-min", "3", "--k-max", "3",
                 "--l", "4", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 2
    assert (tmp_path / "sweep_agg.csv").exists()
    out = capsys.readouterr().out
    assert out.count("wrote ") == 2


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("doctors: 12\nhospitals: 10\nk-min: 1\nk-max: 2\nreps: 2\nl: 3\n")
    out = tmp_path / "o"
    assert main(["sweep", "--config", str(cfg), "--k-max", "4", "--out", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 4


@pytest.mark.parametrize("argv", [
    ["sweep", "--k-min", "5", "--k-max", "2"],
    ["sweep", "--doctors", "1"],
    ["heatmap", "--threads", "zero"],
    ["compare", "--k-cap", "0"],
    ["oracle", "--grid", "1"],
])
def test_usage_errors_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("nonsense: 3\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--config", str(tmp_path / "missing.yaml"), "--out", str(tmp_path)]) == 2


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_output_exit_3(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir(mode=0o500)
    assert main(["ideal", "--doctors", "6", "--hospitals", "5", "--reps", "1", "--out", str(locked / "x")]) == 3


def test_output_path_is_a_file_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["ideal", "--doctors", "6", "--hospitals", "5", "--reps", "1", "--out", str(blocker / "sub")]) == 3


def test_compare_ideal_heatmap_schemas(tmp_path):
    common = ["--doctors", "14", "--hospitals", "12", "--reps", "2", "--out", str(tmp_path)]
    assert main(["compare", "--l", "4", "--k-cap", "2", *common]) == 0
    assert main(["ideal", "--l", "4", "--k-cap", "2", *common]) == 0
    assert main(["heatmap", "--l-min", "1", "--l-max", "2", "--k-min", "1", "--k-max", "3", *common]) == 0
    head = lambda name: (tmp_path / name).read_text().splitlines()[0]
    assert head("compare.csv") == ("replication,doctors_prefer_capped,doctors_prefer_uncapped,"
                                   "hospitals_prefer_capped,hospitals_prefer_uncapped,excess_blocking_pairs")
    assert head("hist.csv") == "arm,interviews,doctor_count,replication"
    assert head("ideal.csv") == ("replication,doctors_prefer_capped,doctors_prefer_ideal,"
                                 "hospitals_prefer_capped,hospitals_prefer_ideal")
    assert head("heatmap.csv") == "l,k,mean_match_rate,n_reps"
    assert len((tmp_path / "heatmap.csv").read_text().splitlines()) == 1 + 6


def test_oracle_exact_passes_printed_fails(tmp_path, capsys):
    assert main(["oracle", "--grid", "6", "--formula", "exact", "--out", str(tmp_path)]) == 0
    assert main(["oracle", "--grid", "6", "--out", str(tmp_path)]) == 1
    header = (tmp_path / "oracle.csv").read_text().splitlines()[0]
    assert header.startswith("n_doctors,n_hospitals,l,k,predicted_matched,observed_matched")
