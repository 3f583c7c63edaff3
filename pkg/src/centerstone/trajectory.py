"""Trajectory logs, run metrics and SVG rendering.

A log is an RFC-4180 CSV preceded by ``#`` header lines that carry the full
config, its hash, the seed, the method and the build. Floats are written
with 17 significant digits so every double survives the round trip.
"""
from __future__ import annotations

import csv
import io
import json
import subprocess
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from centerstone import __version__
from centerstone.config import ConfigError, ScenarioConfig, dumps, loads
from centerstone.consensus import StepReport, build_agents

FORMAT = "centerstone-trajectory/1"
NA = "NA"
CLUSTER_LINKAGE = 1e-2


class LogError(ValueError):
    pass


@lru_cache(maxsize=1)
def build_version() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        tag = out.stdout.strip() if out.returncode == 0 else ""
    except (OSError, subprocess.SubprocessError):
        tag = ""
    return f"{__version__}+{tag}" if tag else __version__


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def columns(d: int) -> list[str]:
    return ["t", "agent", "role", *[f"x{k}" for k in range(d)], *[f"s{k}" for k in range(d)], "status", "resilient", "in_hull"]


def dump_log(config: ScenarioConfig, reports: list[StepReport]) -> str:
    """Serialize a run. ``config`` must carry the seed and method actually used."""
    d = config.dimension
    roles = [a.role for a in config.materialize()]
    buf = io.StringIO(newline="")
    for line in (
        FORMAT,
        f"config: {dumps(config)}",
        f"config_hash: {config.digest()}",
        f"seed: {config.resolved_seed()}",
        f"method: {config.method}",
        f"build: {build_version()}",
    ):
        buf.write(f"# {line}\r\n")
    w = csv.writer(buf)
    w.writerow(columns(d))
    for rep in reports:
        for i, role in enumerate(roles):
            s = rep.safe_points.get(i)
            row = [rep.t, i, role, *map(fmt, rep.positions[i])]
            row += list(map(fmt, s)) if s is not None else [NA] * d
            if role == "normal":
                res = rep.resilient.get(i)
                row += [
                    rep.status.get(i, NA),
                    NA if res is None else int(res),
                    int(rep.in_hull[i]),
                ]
            else:
                row += [NA, NA, NA]
            w.writerow(row)
    return buf.getvalue()


def write_log(path, config: ScenarioConfig, reports: list[StepReport]) -> None:
    Path(path).write_bytes(dump_log(config, reports).encode())


@dataclass
class TrajectoryLog:
    config: ScenarioConfig
    meta: dict[str, str]
    roles: list[str]
    positions: np.ndarray  # (T, N, d)
    safe_points: np.ndarray  # (T, N, d), nan where absent
    status: list[list[str]]
    resilient: list[list[int | None]]
    in_hull: list[list[int | None]]

    @property
    def seed(self) -> int:
        return self.config.resolved_seed()

    @property
    def steps(self) -> int:
        return len(self.positions)


def _cell(value: str, cast):
    return None if value == NA else cast(value)


def parse_log(text: str) -> TrajectoryLog:
    lines = text.splitlines()
    meta = {}
    body = 0
    for body, line in enumerate(lines):
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition(": ")
        meta[key] = value
    if FORMAT not in meta:
        raise LogError("line 1: not a trajectory log")
    if "config" not in meta:
        raise LogError("missing config header")
    try:
        config = loads(meta["config"])
    except ConfigError as exc:
        raise LogError(f"header config: {exc}") from None
    d = config.dimension
    reader = csv.reader(lines[body:])
    header = next(reader, None)
    if header != columns(d):
        raise LogError(f"line {body + 1}: unexpected column header")
    rows: dict[tuple[int, int], list[str]] = {}
    roles: dict[int, str] = {}
    for lineno, row in enumerate(reader, start=body + 2):
        if len(row) != len(header):
            raise LogError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            t, i = int(row[0]), int(row[1])
        except ValueError:
            raise LogError(f"line {lineno}: bad step or agent id") from None
        rows[(t, i)] = row
        roles[i] = row[2]
    if not rows:
        raise LogError("log has no rows")
    n_t = max(t for t, _ in rows) + 1
    n = max(roles) + 1
    pos = np.full((n_t, n, d), np.nan)
    safe = np.full((n_t, n, d), np.nan)
    status = [[NA] * n for _ in range(n_t)]
    resilient = [[None] * n for _ in range(n_t)]
    in_hull = [[None] * n for _ in range(n_t)]
    for (t, i), row in rows.items():
        try:
            pos[t, i] = [float(v) for v in row[3 : 3 + d]]
            safe[t, i] = [np.nan if v == NA else float(v) for v in row[3 + d : 3 + 2 * d]]
            status[t][i] = row[3 + 2 * d]
            resilient[t][i] = _cell(row[4 + 2 * d], int)
            in_hull[t][i] = _cell(row[5 + 2 * d], int)
        except ValueError:
            raise LogError(f"row t={t} agent={i}: malformed number") from None
    if len(rows) != n_t * n:
        raise LogError("log is missing rows")
    return TrajectoryLog(config, meta, [roles[i] for i in range(n)], pos, safe, status, resilient, in_hull)


def read_log(path) -> TrajectoryLog:
    return parse_log(Path(path).read_text())


# -- metrics ----------------------------------------------------------------


def cluster_count(points: np.ndarray, threshold: float = CLUSTER_LINKAGE) -> int:
    if len(points) < 2:
        return len(points)
    return int(fcluster(linkage(points, "single"), threshold, "distance").max())


def metrics(config: ScenarioConfig, reports: list[StepReport]) -> dict:
    normal = build_agents(config).normal
    last = reports[-1]
    converged = last.diameter < config.epsilon
    margins = [r.worst_margin for r in reports[:-1]] if len(reports) > 1 else []
    return {
        "scenario": config.name,
        "method": config.method,
        "seed": config.resolved_seed(),
        "alpha": config.alpha,
        "epsilon": config.epsilon,
        "max_steps": config.max_steps,
        "steps": last.t,
        "final_diameter": last.diameter,
        "steps_to_epsilon": last.t if converged else NA,
        "safety_violations": sum(not ok for r in reports for ok in r.in_hull.values()),
        "resilience_violations": sum(not ok for r in reports for ok in r.resilient.values()),
        "flagged_updates": sum(s != "ok" for r in reports for s in r.status.values()),
        "worst_resilience_margin": margins,
        "terminal_clusters": cluster_count(last.positions[normal]),
    }


def write_metrics(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


# -- SVG --------------------------------------------------------------------


def render_svg(config: ScenarioConfig, reports: list[StepReport], size: int = 600) -> str:
    """Paths of every agent over time (normal in blue, adversarial in red),
    drawn on the first two coordinates of the workspace."""
    lo = np.asarray(config.workspace.lower[:2], dtype=float)
    hi = np.asarray(config.workspace.upper[:2], dtype=float)
    if len(lo) == 1:
        lo, hi = np.r_[lo, 0.0], np.r_[hi, 1.0]
    span = hi - lo
    scale = size / span.max()
    width, height = span * scale

    def xy(p):
        y = p[1] if len(p) > 1 else 0.5 * (lo[1] + hi[1])
        return (p[0] - lo[0]) * scale, height - (y - lo[1]) * scale

    roles = [a.role for a in config.materialize()]
    track = np.array([r.positions for r in reports])
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect width="{width:.2f}" height="{height:.2f}" fill="white" stroke="black"/>',
    ]
    for i, role in enumerate(roles):
        color = "#1f4e9c" if role == "normal" else "#c0392b"
        pts = " ".join("{:.2f},{:.2f}".format(*xy(p)) for p in track[:, i])
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="0.8" opacity="0.6"/>')
        x, y = xy(track[-1, i])
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
