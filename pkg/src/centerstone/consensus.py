"""ADRC consensus: neighbour views, safe points, the convex update and monitors.

Every step is phase-synchronous. All views are gathered from the states at
time ``t``, each normal agent computes its safe point independently (any
randomness it needs comes from a stream keyed by ``(seed, t, agent)``), and
only then are the states at ``t + 1`` written.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import ceil

import numpy as np
from scipy.spatial.distance import pdist

from centerstone import centerpoint as cp
from centerstone import geometry as geo
from centerstone import tverberg as tv
from centerstone.config import Behavior, DiskNetwork, FixedNetwork, ScenarioConfig

log = logging.getLogger(__name__)


# -- methods and bounds ----------------------------------------------------


@dataclass(frozen=True)
class SafePointMethod:
    kind: str
    r: int = cp.DEFAULT_R

    @classmethod
    def parse(cls, text: str) -> "SafePointMethod":
        if text.startswith("iterated-radon"):
            _, _, r = text.partition(":")
            return cls("iterated-radon", int(r) if r else cp.DEFAULT_R)
        if text in ("centerpoint", "tverberg"):
            return cls(text)
        raise ValueError(f"unknown safe-point method {text!r}")

    def effective(self, d: int) -> "SafePointMethod":
        # exact centerpoints are only computed up to three dimensions
        if self.kind == "centerpoint" and d > 3:
            return SafePointMethod("iterated-radon", self.r)
        return self

    def __str__(self):
        return f"iterated-radon:{self.r}" if self.kind == "iterated-radon" else self.kind


def tolerated(n: int, d: int, method) -> int:
    """Largest adversary count ``method`` tolerates in a neighbourhood of ``n``."""
    if isinstance(method, str):
        method = SafePointMethod.parse(method)
    if method.kind == "centerpoint":
        return -(-n // (d + 1)) - 1
    if method.kind == "tverberg":
        return tv.tverberg_bound(n, d)
    return ceil(n / d ** (method.r / (method.r - 1)) - 1e-12) - 1


def resilience_condition(n: int, n_f: int, d: int, method) -> bool:
    return n_f <= tolerated(n, d, method)


# -- adversaries -----------------------------------------------------------

_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def adversary_position(behavior: Behavior, start: np.ndarray, previous: np.ndarray, t: int, lower, upper) -> np.ndarray:
    """Physical position of an adversary at step ``t``."""
    if behavior.kind == "equivocate":
        return adversary_position(behavior.inner or Behavior(), start, previous, t, lower, upper)
    if behavior.kind == "stationary" or t == 0:
        return start.copy()
    if behavior.kind == "oscillating":
        out = start.copy()
        k = min(2, len(start))
        out[:k] += behavior.square_side * _SQUARE[t % 4, :k]
        return out
    # move-away: head for the nearest workspace corner, stop once there
    lower, upper = np.asarray(lower), np.asarray(upper)
    corner = np.where(start - lower < upper - start, lower, upper)
    gap = corner - previous
    dist = float(np.linalg.norm(gap))
    if dist <= behavior.speed:
        return corner.copy()
    return np.clip(previous + behavior.speed * gap / dist, lower, upper)


def equivocation_offset(behavior: Behavior, seed: int, t: int, sender: int, receiver: int, d: int) -> np.ndarray:
    """Per-receiver lie of an equivocating sender, of norm at most ``spread``."""
    rng = np.random.default_rng([seed, t, sender, receiver, 0xB12])
    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction) or 1.0
    return behavior.spread * rng.uniform() ** (1.0 / d) * direction


# -- network ---------------------------------------------------------------


class Network:
    """Directed observation graph: ``(j, i)`` means ``i`` observes ``j``."""

    def __init__(self, n: int, spec: FixedNetwork | DiskNetwork):
        self.n = n
        self.spec = spec
        if isinstance(spec, FixedNetwork):
            incoming = [{i} for i in range(n)]
            for j, i in spec.edges:
                incoming[i].add(j)
                if not spec.directed:
                    incoming[j].add(i)
            self._fixed = [sorted(s) for s in incoming]
        else:
            self._fixed = None

    def neighbors(self, positions: np.ndarray) -> list[list[int]]:
        """In-neighbourhood of every node, self included, in id order."""
        if self._fixed is not None:
            return self._fixed
        r = self.spec.radius
        diff = positions[:, None, :] - positions[None, :, :]
        close = np.sqrt((diff**2).sum(axis=2)) <= r
        return [list(np.flatnonzero(close[i])) for i in range(self.n)]


@dataclass
class Agents:
    roles: list[str]
    behaviors: list[Behavior | None]
    start: np.ndarray

    @property
    def normal(self) -> np.ndarray:
        return np.array([i for i, r in enumerate(self.roles) if r == "normal"])

    def is_adversarial(self, i: int) -> bool:
        return self.roles[i] == "adversarial"


def gather_views(net: Network, agents: Agents, positions: np.ndarray, t: int, seed: int) -> dict[int, np.ndarray]:
    """Values each normal agent receives at step ``t``, self included."""
    d = positions.shape[1]
    hood = net.neighbors(positions)
    views = {}
    for i in agents.normal:
        rows = []
        for j in hood[i]:
            x = positions[j]
            b = agents.behaviors[j]
            if agents.is_adversarial(j) and b is not None and b.kind == "equivocate":
                x = x + equivocation_offset(b, seed, t, int(j), int(i), d)
            rows.append(x)
        views[int(i)] = np.array(rows)
    return views


# -- the update ------------------------------------------------------------


@dataclass(frozen=True)
class AgentUpdate:
    x: np.ndarray
    safe_point: np.ndarray | None
    status: str


def safe_point(view: np.ndarray, method: SafePointMethod, n_f: int, seed: int) -> np.ndarray | None:
    """Safe point of ``view`` tolerating ``n_f`` adversaries, or None."""
    n, d = view.shape
    method = method.effective(d)
    if method.kind == "tverberg":
        out = tv.tverberg_safe_point(view, n_f)
        return None if isinstance(out, tv.NoGuarantee) else out
    if n_f > tolerated(n, d, method):
        return None
    if method.kind == "centerpoint":
        if n < d + 1:
            raise geo.InsufficientPoints(f"need {d + 1} points, got {n}")
        return cp.exact_centerpoint(view, seed=seed).point
    return cp.iterated_radon_centerpoint(view, method.r, seed=seed).point


def adrc_step(view, x_i, alpha: float, method, n_f_assumed: int, seed: int = 0) -> AgentUpdate:
    """One convex update ``x <- alpha * s + (1 - alpha) * x`` toward the safe point.

    Whenever no safe point can be produced the agent holds its state and the
    outcome is flagged in ``status``.
    """
    if isinstance(method, str):
        method = SafePointMethod.parse(method)
    x_i = geo.as_point(x_i)
    view = geo.as_pointset(view, len(x_i))
    try:
        s = safe_point(view, method, n_f_assumed, seed)
    except geo.InsufficientPoints:
        return AgentUpdate(x_i.copy(), None, "insufficient")
    except geo.GeometryError as exc:
        log.warning("safe point failed: %s", exc)
        return AgentUpdate(x_i.copy(), None, "error")
    if s is None:
        return AgentUpdate(x_i.copy(), None, "no-guarantee")
    return AgentUpdate(alpha * s + (1.0 - alpha) * x_i, s, "ok")


def agent_seed(seed: int, t: int, agent: int) -> int:
    return int(np.random.SeedSequence([seed, t, agent]).generate_state(1)[0])


# -- monitors and the loop -------------------------------------------------


@dataclass
class StepReport:
    t: int
    positions: np.ndarray
    safe_points: dict[int, np.ndarray | None] = field(default_factory=dict)
    status: dict[int, str] = field(default_factory=dict)
    view_size: dict[int, int] = field(default_factory=dict)
    adversaries_seen: dict[int, int] = field(default_factory=dict)
    bound: dict[int, int] = field(default_factory=dict)
    in_hull: dict[int, bool] = field(default_factory=dict)
    diameter: float = 0.0

    @property
    def safe(self) -> bool:
        return all(self.in_hull.values())

    @property
    def resilient(self) -> dict[int, bool]:
        return {i: self.adversaries_seen[i] <= self.bound[i] for i in self.bound}

    @property
    def worst_margin(self) -> int | None:
        margins = [self.bound[i] - self.adversaries_seen[i] for i in self.bound]
        return min(margins) if margins else None


def normal_diameter(points: np.ndarray) -> float:
    return float(pdist(points).max()) if len(points) > 1 else 0.0


def build_agents(config: ScenarioConfig) -> Agents:
    specs = config.materialize()
    return Agents(
        roles=[a.role for a in specs],
        behaviors=[a.behavior or (Behavior() if a.role == "adversarial" else None) for a in specs],
        start=np.array([a.position for a in specs], dtype=float),
    )


def run(config: ScenarioConfig, seed: int | None = None, method: str | None = None) -> list[StepReport]:
    """Simulate until the normal agents agree to ``epsilon`` or ``max_steps`` pass.

    The returned list holds one report per visited time step; the last one
    carries no safe points.
    """
    seed = config.resolved_seed() if seed is None else seed
    spm = SafePointMethod.parse(method or config.method)
    agents = build_agents(config)
    n, d = agents.start.shape
    net = Network(n, config.network)
    lower, upper = config.workspace.lower, config.workspace.upper
    normal = agents.normal
    hull = geo.HullMembership(agents.start[normal])
    bound_method = spm.effective(d)

    positions = agents.start.copy()
    reports = []
    for t in range(config.max_steps + 1):
        report = StepReport(t=t, positions=positions.copy())
        report.diameter = normal_diameter(positions[normal])
        report.in_hull = dict(zip(normal.tolist(), hull.contains(positions[normal]).tolist()))
        reports.append(report)
        if t == config.max_steps or report.diameter < config.epsilon:
            break
        hood = net.neighbors(positions)
        views = gather_views(net, agents, positions, t, seed)
        nxt = positions.copy()
        for i in normal.tolist():
            view = views[i]
            k = len(view)
            n_f = max(tolerated(k, d, bound_method), 0)
            upd = adrc_step(view, positions[i], config.alpha, spm, n_f, agent_seed(seed, t, i))
            nxt[i] = upd.x
            report.safe_points[i] = upd.safe_point
            report.status[i] = upd.status
            report.view_size[i] = k
            report.adversaries_seen[i] = sum(agents.is_adversarial(j) for j in hood[i])
            report.bound[i] = tolerated(k, d, bound_method)
        for j in range(n):
            if agents.is_adversarial(j):
                nxt[j] = adversary_position(agents.behaviors[j], agents.start[j], positions[j], t + 1, lower, upper)
        positions = nxt
    return reports
