"""Approximate Tverberg partitions by recursive lifting.

In one dimension the points are paired outward-in around the lower median.
In ``d`` dimensions the last coordinate is dropped, the projected points are
partitioned recursively, and the resulting parts are merged two at a time
along the dropped axis: every part meets the vertical line through the
projected witness in an interval, and a height is chosen so that each
interval either contains it or can be paired with an interval on its other
side. Each level keeps at least half the parts, so ``ceil(n / 2^d)`` parts
survive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from centerstone import geometry as geo
from centerstone.geometry import InsufficientPoints


@dataclass(frozen=True)
class TverbergPartition:
    parts: tuple[tuple[int, ...], ...]
    witness: np.ndarray

    @property
    def r(self) -> int:
        return len(self.parts)


class NoGuarantee:
    """Returned when the requested tolerance exceeds what the partition supports."""

    def __init__(self, n: int, d: int, n_f: int):
        self.n, self.d, self.n_f = n, d, n_f

    def __repr__(self):
        return f"NoGuarantee(n={self.n}, d={self.d}, n_f={self.n_f}, bound={tverberg_bound(self.n, self.d)})"

    def __bool__(self):
        return False


def tverberg_bound(n: int, d: int) -> int:
    """Largest tolerated adversary count, ``ceil(n / 2^d) - 1``."""
    return -(-n // 2**d) - 1


def approx_tverberg(ps) -> TverbergPartition:
    ps = geo.as_pointset(ps)
    n, d = ps.shape
    if n < 2**d:
        raise InsufficientPoints(f"approximate Tverberg needs at least {2**d} points in dimension {d}, got {n}")
    parts, witness = _partition(ps, np.arange(n))
    parts = sorted(tuple(sorted(int(i) for i in p)) for p in parts)
    return TverbergPartition(parts=tuple(parts), witness=witness)


def _partition(ps: np.ndarray, idx: np.ndarray) -> tuple[list[list[int]], np.ndarray]:
    d = ps.shape[1]
    if d == 1:
        return _median_pairs(ps[:, 0], idx)
    lower, w = _partition(ps[:, :-1], idx)
    pos = {int(i): k for k, i in enumerate(idx)}
    spans = [_vertical_span(ps[[pos[i] for i in part]], w) for part in lower]
    z, groups = _pair_spans(spans)
    parts = [[i for g in group for i in lower[g]] for group in groups]
    used = {g for group in groups for g in group}
    leftovers = [i for g in range(len(lower)) if g not in used for i in lower[g]]
    parts[-1].extend(leftovers)
    return parts, np.r_[w, z]


def _median_pairs(x: np.ndarray, idx: np.ndarray) -> tuple[list[list[int]], np.ndarray]:
    order = np.argsort(x, kind="stable")
    n = len(x)
    med = order[(n - 1) // 2]
    parts = []
    lo, hi = 0, n - 1
    while lo < hi:
        parts.append([int(idx[order[lo]]), int(idx[order[hi]])])
        lo, hi = lo + 1, hi - 1
    if lo == hi:
        parts.append([int(idx[order[lo]])])
    return parts, np.array([x[med]])


def _vertical_span(part: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Range of the last coordinate over conv(part) above the projected point ``w``."""
    m, d = part.shape
    base, height = part[:, :-1], part[:, -1]
    if m == 1:
        return float(height[0]), float(height[0])
    if m == 2:
        seg = base[1] - base[0]
        denom = float(seg @ seg)
        t = 0.0 if denom == 0 else float(np.clip((w - base[0]) @ seg / denom, 0.0, 1.0))
        z = float(height[0] + t * (height[1] - height[0]))
        return z, z
    a_eq = np.vstack([base.T, np.ones(m)])
    b_eq = np.r_[w, 1.0]
    out = []
    for sign in (1.0, -1.0):
        res = linprog(sign * height, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
        if res.status != 0:
            # w sits on the boundary within rounding; fall back to the nearest convex weights
            lam = _nearest_weights(base, w)
            out.append(float(lam @ height))
        else:
            out.append(float(res.x @ height))
    return min(out), max(out)


def _nearest_weights(base: np.ndarray, w: np.ndarray) -> np.ndarray:
    m = len(base)
    a_eq = np.zeros((len(w) + 1, m + 2 * len(w)))
    a_eq[:-1, :m] = base.T
    a_eq[:-1, m : m + len(w)] = np.eye(len(w))
    a_eq[:-1, m + len(w) :] = -np.eye(len(w))
    a_eq[-1, :m] = 1.0
    c = np.r_[np.zeros(m), np.ones(2 * len(w))]
    res = linprog(c, A_eq=a_eq, b_eq=np.r_[w, 1.0], bounds=(0, None), method="highs-ds")
    return res.x[:m]


def _pair_spans(spans: list[tuple[float, float]]) -> tuple[float, list[list[int]]]:
    """Pick a height and group interval indices so every group straddles it.

    Intervals containing the height form singleton groups; intervals wholly
    below are paired with intervals wholly above. Among all interval
    endpoints the height giving the most groups wins, lowest height first.
    """
    lo = np.array([s[0] for s in spans])
    hi = np.array([s[1] for s in spans])
    best_z, best_count = None, -1
    for z in np.unique(np.r_[lo, hi]):
        below = int(np.count_nonzero(hi < z))
        above = int(np.count_nonzero(lo > z))
        count = len(spans) - max(below, above)
        if count > best_count:
            best_z, best_count = float(z), count
    z = best_z
    below = [i for i in np.argsort(hi, kind="stable") if hi[i] < z]
    above = [i for i in np.argsort(-lo, kind="stable") if lo[i] > z]
    groups = [[int(i)] for i in range(len(spans)) if lo[i] <= z <= hi[i]]
    # pair the highest "below" intervals with the lowest "above" ones
    for a, b in zip(reversed(below), reversed(above)):
        groups.append([int(a), int(b)])
    return z, groups


def tverberg_safe_point(ps, n_f: int):
    """Witness of :func:`approx_tverberg` if it tolerates ``n_f`` adversaries."""
    ps = geo.as_pointset(ps)
    n, d = ps.shape
    if n_f < 0:
        raise ValueError("n_f must be nonnegative")
    if n_f > tverberg_bound(n, d):
        return NoGuarantee(n, d, n_f)
    part = approx_tverberg(ps)
    if part.r < n_f + 1:
        return NoGuarantee(n, d, n_f)
    return part.witness
