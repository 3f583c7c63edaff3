"""Built-in scenario generators.

Every generator is a pure function of ``(name, seed)`` and returns a config
with explicit agent positions, so the layout it drew is recorded alongside
any run that uses it.
"""
from __future__ import annotations

import re
from itertools import combinations

import numpy as np
from scipy.sparse.csgraph import connected_components

from centerstone.config import Agent, Behavior, DiskNetwork, FixedNetwork, ScenarioConfig, Workspace
from centerstone.consensus import tolerated

SCENARIOS = (
    "scenario_120_stationary",
    "scenario_120_oscillating",
    "scenario_120_moveaway",
    "scenario_28_split",
    "scenario_45_mixed",
    "tight_triangle(n)",
)

_TIGHT = re.compile(r"^tight_triangle(?:\((\d+)\)|_(\d+))$")
_BEHAVIOR_120 = {"stationary": "stationary", "oscillating": "oscillating", "moveaway": "move-away"}
SENSING_RADIUS = 0.45
NORMAL_HALF_WIDTH = 0.5
MAX_DRAWS = 1000


class UnknownScenario(ValueError):
    pass


def generate_scenario(name: str, seed: int = 0) -> ScenarioConfig:
    if name.startswith("scenario_120_") and name[13:] in _BEHAVIOR_120:
        return scenario_120(_BEHAVIOR_120[name[13:]], seed)
    if name == "scenario_28_split":
        return scenario_28_split(seed)
    if name == "scenario_45_mixed":
        return scenario_45_mixed(seed)
    m = _TIGHT.match(name)
    if m:
        return tight_triangle_config(int(m.group(1) or m.group(2)), seed)
    raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}")


def _agents(points, adversarial, behavior=None) -> list[Agent]:
    return [
        Agent(
            id=i,
            role="adversarial" if adv else "normal",
            position=[float(v) for v in x],
            behavior=behavior if adv else None,
        )
        for i, (x, adv) in enumerate(zip(points, adversarial))
    ]


# -- 120 agents on a disk graph -------------------------------------------


def _acceptable_120(pts: np.ndarray, n_normal: int) -> bool:
    """Every normal agent starts resilient with at least three others in view,
    and the normal agents form one connected component."""
    close = np.linalg.norm(pts[:, None] - pts[None], axis=2) <= SENSING_RADIUS
    for i in range(n_normal):
        k = int(close[i].sum())
        adv = int(close[i, n_normal:].sum())
        if k < 4 or adv > tolerated(k, 2, "centerpoint"):
            return False
    n_comp, _ = connected_components(close[:n_normal, :n_normal], directed=False)
    return n_comp == 1


def scenario_120(behavior: str = "stationary", seed: int = 0) -> ScenarioConfig:
    """100 normal and 20 adversarial agents in the workspace ``[-1, 1]^2``.

    Normal agents are drawn uniformly from the central box
    ``[-0.5, 0.5]^2`` and adversaries from the whole workspace. Spreading the
    normal agents over all of ``W`` thins the disk graph until it falls
    apart into local clusters that never meet again. Layouts are redrawn
    until the start satisfies :func:`_acceptable_120`.
    """
    n_normal, n_adv = 100, 20
    rng = np.random.default_rng([seed, 120])
    for _ in range(MAX_DRAWS):
        pts = np.vstack([
            rng.uniform(-NORMAL_HALF_WIDTH, NORMAL_HALF_WIDTH, size=(n_normal, 2)),
            rng.uniform(-1.0, 1.0, size=(n_adv, 2)),
        ])
        if _acceptable_120(pts, n_normal):
            break
    else:
        raise RuntimeError("no acceptable 120-agent layout found")
    tag = "moveaway" if behavior == "move-away" else behavior
    return ScenarioConfig(
        name=f"scenario_120_{tag}",
        dimension=2,
        workspace=Workspace(lower=[-1.0, -1.0], upper=[1.0, 1.0]),
        agents=_agents(pts, [i >= n_normal for i in range(len(pts))], Behavior(kind=behavior)),
        network=DiskNetwork(radius=SENSING_RADIUS),
        seed=seed,
    )


# -- 28 agents, two clusters ------------------------------------------------


def scenario_28_split(seed: int = 0) -> ScenarioConfig:
    """Two clusters of 8 normal agents, each flanked by 6 stationary adversaries.

    All normal agents observe each other; each also observes the 6
    adversaries at the far end of its own side, so every normal
    neighbourhood has 22 members including the agent itself.
    """
    rng = np.random.default_rng([seed, 28])
    pts, adv = [], []
    for side in (-1.0, 1.0):
        x = side * rng.uniform(0.75, 1.05, 8)
        y = rng.uniform(-0.25, 0.25, 8)
        pts += list(np.c_[x, y])
        adv += [False] * 8
    for side in (-1.0, 1.0):
        x = side * rng.uniform(1.3, 1.5, 6)
        y = rng.uniform(-0.35, 0.35, 6)
        pts += list(np.c_[x, y])
        adv += [True] * 6
    normal_l, normal_r = range(0, 8), range(8, 16)
    adv_l, adv_r = range(16, 22), range(22, 28)
    edges = list(combinations(range(16), 2))
    edges += [(a, i) for i in normal_l for a in adv_l]
    edges += [(a, i) for i in normal_r for a in adv_r]
    return ScenarioConfig(
        name="scenario_28_split",
        dimension=2,
        workspace=Workspace(lower=[-1.5, -0.375], upper=[1.5, 0.375]),
        agents=_agents(pts, adv, Behavior()),
        network=FixedNetwork(edges=edges),
        seed=seed,
    )


# -- 45 agents with two weakly connected agents ------------------------------


def scenario_45_mixed(seed: int = 0) -> ScenarioConfig:
    """38 well-connected normal agents plus two weakly connected ones.

    The two weak agents observe each other, 3 and 4 agents of the main
    group respectively, and two adversaries placed beyond them, giving
    neighbourhoods of 7 and 8 with 2 adversaries each. That is within the
    centerpoint bound (2) but above the Tverberg bound (1). The main group
    is fully connected and also observes the three remaining adversaries.
    """
    rng = np.random.default_rng([seed, 45])
    radius = 0.5 * np.sqrt(rng.uniform(size=38))
    angle = rng.uniform(0, 2 * np.pi, 38)
    bulk = np.c_[0.3 + radius * np.cos(angle), radius * np.sin(angle)]
    weak = np.c_[rng.uniform(-0.9, -0.7, 2), rng.uniform(-0.15, 0.15, 2)]
    near = np.c_[rng.uniform(-1.5, -1.3, 2), rng.uniform(-0.4, 0.4, 2)]
    far = np.c_[rng.uniform(1.2, 1.4, 3), rng.uniform(-0.8, 0.8, 3)]
    pts = np.vstack([bulk, weak, near, far])
    adv = [False] * 40 + [True] * 5
    y1, y2 = 38, 39
    # the weak agents see the main-group agents closest to them
    order = [int(i) for i in np.argsort(np.linalg.norm(bulk - weak.mean(axis=0), axis=1))]
    edges = list(combinations(range(38), 2))
    edges.append((y1, y2))
    edges += [(y1, j) for j in order[:3]]
    edges += [(y2, j) for j in order[3:7]]
    edges += [(a, y) for a in (40, 41) for y in (y1, y2)]
    edges += [(a, j) for a in (42, 43, 44) for j in range(38)]
    return ScenarioConfig(
        name="scenario_45_mixed",
        dimension=2,
        workspace=Workspace(lower=[-1.5, -1.0], upper=[1.5, 1.0]),
        agents=_agents(pts, adv, Behavior()),
        network=FixedNetwork(edges=edges),
        seed=seed,
    )


# -- tightness family --------------------------------------------------------


def tight_triangle(n: int, seed: int = 0, spread: float = 1e-3) -> np.ndarray:
    """``n = 3m`` points in three tight clusters at the vertices of a triangle."""
    if n < 3 or n % 3:
        raise ValueError("tight_triangle needs n = 3m with m >= 1")
    m = n // 3
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    rng = np.random.default_rng([seed, n, 3])
    return np.repeat(vertices, m, axis=0) + rng.uniform(-spread, spread, size=(n, 2))


def tight_triangle_config(n: int, seed: int = 0) -> ScenarioConfig:
    pts = tight_triangle(n, seed)
    return ScenarioConfig(
        name=f"tight_triangle({n})",
        dimension=2,
        workspace=Workspace(lower=[-0.5, -0.5], upper=[1.5, 1.5]),
        agents=_agents(pts, [False] * n),
        network=FixedNetwork(edges=list(combinations(range(n), 2))),
        seed=seed,
    )
