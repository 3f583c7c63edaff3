import numpy as np
import pytest

from centerstone import consensus as cs
from centerstone import oracle
from centerstone.scenarios import UnknownScenario, generate_scenario, tight_triangle


def neighbourhoods(cfg):
    agents = cs.build_agents(cfg)
    hood = cs.Network(len(agents.roles), cfg.network).neighbors(agents.start)
    return agents, hood


@pytest.mark.parametrize("kind", ["stationary", "oscillating", "moveaway"])
def test_120_counts(kind):
    cfg = generate_scenario(f"scenario_120_{kind}", 0)
    roles = [a.role for a in cfg.materialize()]
    assert roles.count("normal") == 100 and roles.count("adversarial") == 20
    assert cfg.network.radius == 0.45
    assert cfg.workspace.lower == [-1, -1] and cfg.workspace.upper == [1, 1]


def test_120_starts_resilient():
    cfg = generate_scenario("scenario_120_moveaway", 2)
    agents, hood = neighbourhoods(cfg)
    for i in agents.normal:
        adv = sum(agents.is_adversarial(j) for j in hood[i])
        assert cs.resilience_condition(len(hood[i]), adv, 2, "centerpoint")


def test_28_split_neighbourhoods():
    cfg = generate_scenario("scenario_28_split", 0)
    agents, hood = neighbourhoods(cfg)
    assert len(agents.roles) == 28 and len(agents.normal) == 16
    for i in agents.normal:
        assert len(hood[i]) == 22
        assert sum(agents.is_adversarial(j) for j in hood[i]) == 6
    assert cfg.workspace.lower == [-1.5, -0.375] and cfg.workspace.upper == [1.5, 0.375]
    assert all(cfg.workspace.contains(x) for x in agents.start)


def test_45_mixed_neighbourhoods():
    cfg = generate_scenario("scenario_45_mixed", 0)
    agents, hood = neighbourhoods(cfg)
    assert len(agents.roles) == 45 and len(agents.normal) == 40
    weak = []
    for i in agents.normal:
        n, adv = len(hood[i]), sum(agents.is_adversarial(j) for j in hood[i])
        assert cs.resilience_condition(n, adv, 2, "centerpoint")
        if not cs.resilience_condition(n, adv, 2, "tverberg"):
            weak.append((n, adv))
    assert sorted(weak) == [(7, 2), (8, 2)]


def test_generators_are_pure():
    for name in ("scenario_120_stationary", "scenario_28_split", "scenario_45_mixed", "tight_triangle(9)"):
        assert generate_scenario(name, 5) == generate_scenario(name, 5)
    assert generate_scenario("scenario_28_split", 5) != generate_scenario("scenario_28_split", 6)


def test_tight_triangle_six():
    assert not oracle.oracle_safe_point_exists(tight_triangle(6), 2)


def test_tight_triangle_names():
    assert len(generate_scenario("tight_triangle(9)").agents) == 9
    assert len(generate_scenario("tight_triangle_12").agents) == 12
    with pytest.raises(ValueError):
        tight_triangle(7)


def test_unknown():
    with pytest.raises(UnknownScenario):
        generate_scenario("scenario_99")


def test_tight_triangle_spread():
    pts = tight_triangle(12, seed=1)
    assert np.abs(pts[:4] - [0, 0]).max() <= 1e-3
