from itertools import combinations

import numpy as np
import pytest

from centerstone import consensus as cs
from centerstone import geometry as geo
from centerstone.config import Agent, Behavior, DiskNetwork, FixedNetwork, ScenarioConfig, Workspace
from centerstone.scenarios import generate_scenario

W2 = Workspace(lower=[-1, -1], upper=[1, 1])


def complete_config(points, roles=None, behavior=None, **kw):
    roles = roles or ["normal"] * len(points)
    agents = [
        Agent(id=i, role=r, position=list(map(float, p)), behavior=behavior if r == "adversarial" else None)
        for i, (p, r) in enumerate(zip(points, roles))
    ]
    edges = list(combinations(range(len(points)), 2))
    return ScenarioConfig(dimension=len(points[0]), workspace=W2, agents=agents, network=FixedNetwork(edges=edges), **kw)


# -- resilience condition ---------------------------------------------------


def test_bounds_22():
    assert cs.tolerated(22, 2, "centerpoint") == 7
    assert cs.tolerated(22, 2, "tverberg") == 5


@pytest.mark.parametrize("n", [7, 8])
def test_weak_neighbourhoods(n):
    assert cs.resilience_condition(n, 2, 2, "centerpoint")
    assert not cs.resilience_condition(n, 2, 2, "tverberg")


@pytest.mark.parametrize("method", ["centerpoint", "tverberg", "iterated-radon:3"])
def test_trivial_condition(method):
    assert cs.resilience_condition(3, 0, 2, method)


def test_radon_bound():
    assert cs.tolerated(60, 4, "iterated-radon:3") == 7


def test_method_parsing():
    assert cs.SafePointMethod.parse("iterated-radon:4").r == 4
    assert cs.SafePointMethod.parse("iterated-radon").r == 3
    assert cs.SafePointMethod.parse("centerpoint").effective(4).kind == "iterated-radon"
    with pytest.raises(ValueError):
        cs.SafePointMethod.parse("mean")


# -- views ------------------------------------------------------------------


def test_views_complete_graph():
    pts = np.array([[0, 0], [1, 0], [0, 1]], dtype=float)
    cfg = complete_config(pts)
    agents = cs.build_agents(cfg)
    views = cs.gather_views(cs.Network(3, cfg.network), agents, pts, 0, 0)
    for i in range(3):
        assert np.array_equal(views[i], pts)


def test_equivocation_differs_per_receiver():
    pts = np.array([[0, 0], [1, 0], [0.5, 0.5]], dtype=float)
    cfg = complete_config(pts, ["normal", "normal", "adversarial"], Behavior(kind="equivocate", spread=0.05))
    agents = cs.build_agents(cfg)
    views = cs.gather_views(cs.Network(3, cfg.network), agents, pts, 4, 9)
    a, b = views[0], views[1]
    assert np.array_equal(a[:2], b[:2])
    assert not np.array_equal(a[2], b[2])
    assert np.linalg.norm(a[2] - pts[2]) <= 0.05 and np.linalg.norm(b[2] - pts[2]) <= 0.05


def test_disk_threshold():
    net = cs.Network(2, DiskNetwork(radius=0.45))
    assert net.neighbors(np.array([[0.0, 0.0], [0.5, 0.0]])) == [[0], [1]]
    assert net.neighbors(np.array([[0.0, 0.0], [0.45, 0.0]])) == [[0, 1], [0, 1]]


def test_directed_fixed_network():
    net = cs.Network(3, FixedNetwork(edges=[(0, 1)], directed=True))
    assert net.neighbors(None) == [[0], [0, 1], [2]]


# -- adversaries ------------------------------------------------------------


def test_oscillating_cycles_square():
    b = Behavior(kind="oscillating", square_side=0.1)
    x0 = np.array([0.2, 0.3])
    seen = [cs.adversary_position(b, x0, x0, t, [-1, -1], [1, 1]) for t in range(1, 9)]
    assert np.allclose(seen[3], x0) and np.allclose(seen[7], x0)
    assert np.allclose(seen[0], [0.3, 0.3]) and np.allclose(seen[1], [0.3, 0.4]) and np.allclose(seen[2], [0.2, 0.4])


def test_move_away_clamps_at_corner():
    b = Behavior(kind="move-away", speed=0.3)
    x0 = np.array([0.6, -0.7])
    x = x0
    for t in range(1, 10):
        x = cs.adversary_position(b, x0, x, t, [-1, -1], [1, 1])
    assert np.allclose(x, [1, -1])


# -- the update -------------------------------------------------------------


def test_update_arithmetic(monkeypatch):
    monkeypatch.setattr(cs, "safe_point", lambda *a: np.array([1.0, 1.0]))
    up = cs.adrc_step(np.zeros((3, 2)), [0, 0], 0.8, "centerpoint", 0)
    assert np.allclose(up.x, [0.8, 0.8]) and up.status == "ok"
    up = cs.adrc_step(np.zeros((3, 2)), [0, 0], 1.0, "centerpoint", 0)
    assert np.array_equal(up.x, [1.0, 1.0])


def test_update_coincident_view_stays():
    p = np.array([0.3, -0.2])
    up = cs.adrc_step(np.tile(p, (6, 1)), p, 0.8, "centerpoint", 1, seed=5)
    assert np.abs(up.x - p).max() <= 1e-5


def test_update_holds_without_guarantee():
    view = np.random.default_rng(0).uniform(-1, 1, (6, 2))
    up = cs.adrc_step(view, view[0], 0.8, "centerpoint", 2)  # bound is 1
    assert up.status == "no-guarantee" and np.array_equal(up.x, view[0])
    up = cs.adrc_step(view[:2], view[0], 0.8, "centerpoint", 0)
    assert up.status == "insufficient" and np.array_equal(up.x, view[0])
    up = cs.adrc_step(view, view[0], 0.8, "tverberg", 2)
    assert up.status == "no-guarantee"


def test_update_safe_point_is_deep():
    view = np.random.default_rng(1).uniform(-1, 1, (12, 2))
    up = cs.adrc_step(view, view[0], 0.8, "centerpoint", 3)
    assert geo.depth(up.safe_point, view) >= 4


# -- runs -------------------------------------------------------------------


def test_all_normal_complete_graph_converges():
    pts = np.random.default_rng(2).uniform(-1, 1, (10, 2))
    reports = cs.run(complete_config(pts, seed=0))
    assert reports[-1].diameter < 1e-3 and reports[-1].t <= 100
    assert all(r.safe for r in reports)


def test_triangle_cluster_neighbourhood_flags_steps():
    # equal thirds at the vertices of a triangle, one third adversarial
    base = np.array([[0, 0], [1, 0], [0.5, 0.8]])
    pts = np.repeat(base, 2, axis=0) + np.random.default_rng(3).uniform(-1e-3, 1e-3, (6, 2))
    roles = ["normal", "adversarial", "normal", "adversarial", "normal", "normal"]
    cfg = complete_config(pts, roles, Behavior(), max_steps=3)
    assert not cs.resilience_condition(6, 2, 2, "centerpoint")
    reports = cs.run(cfg)
    assert any(not ok for r in reports[:-1] for ok in r.resilient.values())


def test_run_deterministic_and_phase_synchronous():
    cfg = generate_scenario("scenario_28_split", 1)
    a = cs.run(cfg)
    b = cs.run(cfg)
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert np.array_equal(x.positions, y.positions)


def test_update_locality_replay():
    # one agent's step recomputed in isolation matches the full run bit for bit
    cfg = generate_scenario("scenario_45_mixed", 2)
    reports = cs.run(cfg)
    agents = cs.build_agents(cfg)
    net = cs.Network(len(agents.roles), cfg.network)
    t, i = 2, 39
    views = cs.gather_views(net, agents, reports[t].positions, t, cfg.resolved_seed())
    n_f = cs.tolerated(len(views[i]), 2, "centerpoint")
    up = cs.adrc_step(views[i], reports[t].positions[i], cfg.alpha, "centerpoint", n_f, cs.agent_seed(cfg.resolved_seed(), t, i))
    assert np.array_equal(up.x, reports[t + 1].positions[i])


def test_monotone_hull():
    cfg = generate_scenario("scenario_28_split", 0)
    reports = cs.run(cfg)
    normal = cs.build_agents(cfg).normal
    for prev, cur in zip(reports, reports[1:]):
        hull = geo.HullMembership(prev.positions[normal])
        assert hull.contains(cur.positions[normal]).all()


def test_stationary_120_converges_safely():
    cfg = generate_scenario("scenario_120_stationary", 0)
    reports = cs.run(cfg)
    assert reports[-1].diameter < cfg.epsilon
    assert all(r.safe for r in reports)
