import json
import subprocess
import sys

import pytest

from centerstone import cli, config, trajectory
from centerstone.scenarios import generate_scenario


@pytest.fixture(scope="module")
def split_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("split")
    assert cli.main(["run", "--scenario", "scenario_28_split", "--seed", "1", "--out", str(out), "--svg"]) == 0
    return out


def test_run_writes_outputs(split_run):
    metrics = json.loads((split_run / "metrics.json").read_text())
    assert metrics["safety_violations"] == 0
    assert metrics["steps_to_epsilon"] != "NA"
    assert metrics["epsilon"] == 1e-3 and metrics["max_steps"] == 500
    assert len(metrics["worst_resilience_margin"]) == metrics["steps"]
    assert (split_run / "trajectory.svg").read_text().startswith("<svg")


def test_log_layout(split_run):
    text = (split_run / "trajectory.csv").read_text()
    head = [l for l in text.splitlines() if l.startswith("#")]
    assert head[0] == "# centerstone-trajectory/1"
    assert any(l.startswith("# config_hash: ") for l in head)
    assert any(l.startswith("# build: ") for l in head)
    log = trajectory.parse_log(text)
    assert log.positions.shape[1:] == (28, 2)
    assert log.config.seed == 1


def test_log_round_trips_doubles(split_run):
    log = trajectory.read_log(split_run / "trajectory.csv")
    cfg = generate_scenario("scenario_28_split", 1)
    start = [a.position for a in cfg.materialize()]
    assert log.positions[0].tolist() == start


def test_verify_clean(split_run):
    assert cli.main(["verify", "--log", str(split_run / "trajectory.csv"), "--depth-checks", "3"]) == 0


def test_verify_zero_checks_is_noop(split_run):
    assert cli.main(["verify", "--log", str(split_run / "trajectory.csv"), "--depth-checks", "0"]) == 0


def test_verify_detects_corruption(split_run, tmp_path):
    lines = (split_run / "trajectory.csv").read_text().splitlines(keepends=True)
    idx = next(i for i, l in enumerate(lines) if l.startswith("3,4,normal,"))
    fields = lines[idx].split(",")
    fields[3] = repr(float(fields[3]) + 0.01)
    lines[idx] = ",".join(fields)
    bad = tmp_path / "bad.csv"
    bad.write_text("".join(lines))
    assert cli.main(["verify", "--log", str(bad), "--depth-checks", "2"]) == 1


def test_verify_unparseable(tmp_path):
    bad = tmp_path / "x.csv"
    bad.write_text("t,agent\n1,2\n")
    assert cli.main(["verify", "--log", str(bad)]) == 2


def test_run_bad_config_exit_2(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text('{\n  "dimension": 2,\n  "alpha": 7\n}\n')
    assert cli.main(["run", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "line" in capsys.readouterr().err


def test_run_unknown_scenario_exit_2(tmp_path):
    assert cli.main(["run", "--scenario", "nope", "--out", str(tmp_path)]) == 2


def test_run_bad_method_exit_2(tmp_path):
    assert cli.main(["run", "--scenario", "tight_triangle(6)", "--method", "mean", "--out", str(tmp_path)]) == 2


def test_generate_round_trip(tmp_path, capsys):
    assert cli.main(["generate", "scenario_45_mixed", "--seed", "2"]) == 0
    printed = capsys.readouterr().out
    assert config.loads(printed) == generate_scenario("scenario_45_mixed", 2)
    out = tmp_path / "g.json"
    assert cli.main(["generate", "tight_triangle(6)", "--out", str(out)]) == 0
    assert config.load(out) == generate_scenario("tight_triangle(6)")


def test_run_from_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    config.save(generate_scenario("tight_triangle(9)", 0), cfg_path)
    assert cli.main(["run", "--config", str(cfg_path), "--method", "iterated-radon:2", "--out", str(tmp_path / "o")]) == 0
    log = trajectory.read_log(tmp_path / "o" / "trajectory.csv")
    assert log.config.method == "iterated-radon:2"


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "centerstone", "generate", "tight_triangle(3)"], capture_output=True, text=True
    )
    assert out.returncode == 0 and '"dimension":2' in out.stdout
