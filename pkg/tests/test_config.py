import json

import pytest

from centerstone import config
from centerstone.scenarios import SCENARIOS, generate_scenario

BASE = {
    "dimension": 2,
    "workspace": {"lower": [-1, -1], "upper": [1, 1]},
    "generator": {"normal": 6, "adversarial": 1},
    "network": {"mode": "disk", "radius": 0.5},
}


def with_(**changes):
    data = json.loads(json.dumps(BASE))
    data.update(changes)
    return json.dumps(data, indent=2)


def test_defaults():
    cfg = config.loads(with_())
    assert cfg.alpha == 0.8 and cfg.epsilon == 1e-3 and cfg.max_steps == 500
    assert cfg.method == "centerpoint" and cfg.schema_version == 1


@pytest.mark.parametrize("name", [n for n in SCENARIOS if "(" not in n] + ["tight_triangle(6)"])
def test_round_trip(tmp_path, name):
    cfg = generate_scenario(name, 3)
    path = tmp_path / "c.json"
    config.save(cfg, path)
    assert config.load(path) == cfg
    assert config.loads(config.dumps(cfg)).digest() == cfg.digest()


def test_generator_materializes_in_workspace():
    cfg = config.loads(with_(seed=4))
    agents = cfg.materialize()
    assert len(agents) == 7 and agents[-1].role == "adversarial"
    assert all(cfg.workspace.contains(a.position) for a in agents)
    assert agents == config.loads(with_(seed=4)).materialize()


@pytest.mark.parametrize(
    "changes,needle",
    [
        ({"alpha": 1.5}, "alpha"),
        ({"alpha": 0}, "alpha"),
        ({"epsilon": 0}, "epsilon"),
        ({"max_steps": 0}, "max_steps"),
        ({"dimension": 3}, "dimension"),
        ({"network": {"mode": "disk", "radius": -1}}, "radius"),
        ({"method": "median"}, "method"),
        ({"method": "iterated-radon:1"}, "r > 1"),
        ({"schema_version": 2}, "schema_version"),
        ({"colour": "red"}, "colour"),
    ],
)
def test_validation_errors(changes, needle):
    with pytest.raises(config.ConfigError) as exc:
        config.loads(with_(**changes))
    assert needle in str(exc.value)
    assert exc.value.line is not None


def test_error_line_points_at_field():
    text = with_(alpha=3)
    with pytest.raises(config.ConfigError) as exc:
        config.loads(text)
    line = text.splitlines()[exc.value.line - 1]
    assert '"alpha"' in line


def test_json_syntax_error_line():
    with pytest.raises(config.ConfigError) as exc:
        config.loads('{\n  "dimension": 2,\n  oops\n}')
    assert exc.value.line == 3


def test_agents_and_generator_exclusive():
    data = json.loads(with_())
    data["agents"] = [{"id": 0, "position": [0, 0]}]
    with pytest.raises(config.ConfigError):
        config.loads(json.dumps(data))


def test_agent_dimension_mismatch():
    data = json.loads(with_())
    del data["generator"]
    data["agents"] = [{"id": 0, "position": [0, 0, 0]}]
    with pytest.raises(config.ConfigError, match="dimension"):
        config.loads(json.dumps(data))


def test_seed_env_fallback(monkeypatch):
    cfg = config.loads(with_())
    monkeypatch.setenv(config.SEED_ENV, "17")
    assert cfg.resolved_seed() == 17
    assert config.loads(with_(seed=3)).resolved_seed() == 3
    monkeypatch.delenv(config.SEED_ENV)
    assert cfg.resolved_seed() == 0


def test_overrides():
    cfg = config.loads(with_()).with_overrides(method="tverberg", seed=None)
    assert cfg.method == "tverberg" and cfg.seed is None
