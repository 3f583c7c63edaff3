"""Re-checking a logged run against the config it claims to come from.

The structural checks replay the update rule row by row; the sampled checks
hand the logged states to the brute-force oracle, which shares no hull or
depth code with the simulator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from centerstone import oracle
from centerstone.consensus import Network, SafePointMethod, adversary_position, build_agents, gather_views, tolerated
from centerstone.trajectory import TrajectoryLog


@dataclass
class AuditReport:
    discrepancies: list[str] = field(default_factory=list)
    hull_checks: int = 0
    depth_checks: int = 0
    skipped_depth: int = 0

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def flag(self, message: str) -> None:
        self.discrepancies.append(message)


def _same(a: np.ndarray, b: np.ndarray, scale: float) -> bool:
    return bool(np.all(np.abs(a - b) <= 1e-12 * scale))


def audit(log: TrajectoryLog, depth_checks: int = 5, sample_seed: int | None = None) -> AuditReport:
    """Check ``log``; ``depth_checks = 0`` only parses it."""
    rep = AuditReport()
    if depth_checks <= 0:
        return rep
    cfg = log.config
    specs = cfg.materialize()
    start = np.array([a.position for a in specs], dtype=float)
    if [a.role for a in specs] != log.roles:
        rep.flag("agent roles differ from the header config")
        return rep
    n_t, n, d = log.positions.shape
    scale = max(1.0, float(np.abs(start).max()))
    normal = [i for i, r in enumerate(log.roles) if r == "normal"]
    agents = build_agents(cfg)
    lower, upper = cfg.workspace.lower, cfg.workspace.upper

    if not _same(log.positions[0], start, scale):
        rep.flag("t=0: positions differ from the header config")
    for t in range(n_t - 1):
        x, nxt = log.positions[t], log.positions[t + 1]
        for i in normal:
            status = log.status[t][i]
            s = log.safe_points[t, i]
            if status == "ok":
                expect = cfg.alpha * s + (1.0 - cfg.alpha) * x[i]
            else:
                expect = x[i]
            if not _same(nxt[i], expect, scale):
                rep.flag(f"t={t + 1} agent={i}: state does not follow the update rule")
        for j in range(n):
            if agents.is_adversarial(j):
                b = agents.behaviors[j]
                expect = adversary_position(b, start[j], x[j], t + 1, lower, upper)
                if not _same(nxt[j], expect, scale):
                    rep.flag(f"t={t + 1} agent={j}: adversary position does not follow its behavior")

    rng = np.random.default_rng([log.seed if sample_seed is None else sample_seed, 0xA0D17])
    steps = np.sort(rng.choice(n_t, size=min(depth_checks, n_t), replace=False))
    hull = oracle.OracleHull(start[normal])
    method = SafePointMethod.parse(cfg.method).effective(d)
    net = Network(n, cfg.network)
    for t in steps.tolist():
        for i in normal:
            inside = hull.contains(log.positions[t, i])
            rep.hull_checks += 1
            if log.in_hull[t][i] is None or bool(log.in_hull[t][i]) != inside:
                rep.flag(f"t={t} agent={i}: safety flag {log.in_hull[t][i]} but oracle says {int(inside)}")
        if t == n_t - 1:
            continue
        views = gather_views(net, agents, log.positions[t], t, log.seed)
        for i in normal:
            if log.status[t][i] != "ok":
                continue
            view = views[i]
            try:
                k = oracle.oracle_depth(log.safe_points[t, i], view)
            except oracle.OracleLimitExceeded:
                rep.skipped_depth += 1
                continue
            rep.depth_checks += 1
            need = tolerated(len(view), d, method) + 1
            if k < need:
                rep.flag(f"t={t} agent={i}: safe point depth {k} below the required {need}")
    return rep

