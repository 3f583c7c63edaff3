"""Brute-force ground truth for depth, hull membership and safe-point existence.

Nothing here calls into :mod:`centerstone.geometry`; the routines are slow,
exhaustive and deliberately written differently (cofactor normals, facet
enumeration) so they can be used to check the fast paths.
"""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np
from scipy.optimize import linprog

DEPTH_LIMITS = {1: 10_000, 2: 200, 3: 80, 4: 60, 5: 40}
SAFE_POINT_LIMIT = 15
TOL = 1e-9


class OracleLimitExceeded(ValueError):
    """The input is too large for exhaustive checking."""


def _points(ps):
    arr = np.asarray(ps, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def _cofactor_normals(rows: np.ndarray) -> np.ndarray:
    """Generalised cross product of each stack of ``d-1`` vectors in ``R^d``."""
    c, dm1, d = rows.shape
    out = np.empty((c, d))
    for j in range(d):
        minor = np.delete(rows, j, axis=2)
        sign = -1.0 if j % 2 else 1.0
        out[:, j] = sign * (np.linalg.det(minor) if dm1 else 1.0)
    return out


def oracle_depth(p, ps) -> int:
    """Exact half-space depth by exhausting hyperplanes through ``p``.

    Every hyperplane through ``p`` and ``d-1`` sample points is tilted so the
    defining points fall on the far side; the count of everything else on the
    closed near side is taken for both orientations. Intended for point sets
    in general position.
    """
    ps = _points(ps)
    n, d = ps.shape
    p = np.asarray(p, dtype=float).reshape(d)
    limit = DEPTH_LIMITS.get(d, 0)
    if n > limit:
        raise OracleLimitExceeded(f"oracle_depth refuses n={n} in d={d} (limit {limit})")
    v = ps - p
    lengths = np.sqrt((v * v).sum(axis=1))
    scale = max(1.0, np.abs(ps).max(), np.abs(p).max())
    coincident = lengths <= TOL * scale
    if d == 1:
        above = int(np.sum(v[:, 0] >= -TOL * scale))
        below = int(np.sum(v[:, 0] <= TOL * scale))
        return min(above, below)
    best = n
    subsets = np.array(list(combinations(range(n), d - 1)), dtype=int)
    for start in range(0, len(subsets), 50_000):
        sub = subsets[start : start + 50_000]
        normals = _cofactor_normals(v[sub])
        size = np.sqrt((normals * normals).sum(axis=1))
        keep = size > TOL * np.prod(lengths[sub], axis=1)
        keep &= ~coincident[sub].any(axis=1)
        if not keep.any():
            continue
        sub, normals = sub[keep], normals[keep] / size[keep, None]
        proj = normals @ v.T
        band = TOL * np.maximum(lengths, TOL)
        defining = np.zeros(proj.shape, dtype=bool)
        np.put_along_axis(defining, sub, True, axis=1)
        up = ((proj >= -band) & ~defining).sum(axis=1)
        down = ((proj <= band) & ~defining).sum(axis=1)
        best = min(best, int(up.min()), int(down.min()))
    return best


def facets(ps) -> tuple[np.ndarray, np.ndarray] | None:
    """Facet inequalities ``A x <= b`` of conv(ps) by brute-force enumeration.

    A ``d``-subset spans a facet when every point lies on one closed side of
    its hyperplane. Returns None when the hull is not full-dimensional.
    """
    ps = _points(ps)
    n, d = ps.shape
    if d == 1:
        lo, hi = ps.min(), ps.max()
        if hi - lo <= TOL * max(1.0, abs(lo), abs(hi)):
            return None
        return np.array([[1.0], [-1.0]]), np.array([hi, -lo])
    if n < d + 1:
        return None
    scale = max(1.0, np.abs(ps).max())
    rows, rhs = [], []
    for sub in combinations(range(n), d):
        base = ps[sub[0]]
        normal = _cofactor_normals((ps[list(sub[1:])] - base)[None])[0]
        size = np.sqrt(normal @ normal)
        if size <= TOL * scale ** (d - 1):
            continue
        normal /= size
        side = (ps - base) @ normal
        if np.all(side <= TOL * scale):
            rows.append(normal)
            rhs.append(normal @ base)
        elif np.all(side >= -TOL * scale):
            rows.append(-normal)
            rhs.append(-normal @ base)
    if not rows:
        return None
    return np.array(rows), np.array(rhs)


class OracleHull:
    """conv(ps) as an enumerated facet system, for repeated membership tests.

    Lower-dimensional hulls are handled by restricting to their affine span.
    """

    def __init__(self, ps, tol: float = TOL):
        ps = _points(ps)
        self.tol = tol
        self.scale = max(1.0, np.abs(ps).max())
        self.origin = ps[0]
        diffs = ps - self.origin
        _, s, vt = np.linalg.svd(diffs, full_matrices=True)
        self.rank = int(np.sum(s > TOL * self.scale))
        self.basis = vt[: self.rank]
        self.system = facets(diffs @ self.basis.T) if self.rank else None

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float).reshape(self.origin.shape)
        off = p - self.origin
        slack = self.tol * self.scale
        if self.rank == 0:
            return bool(np.abs(off).max() <= slack)
        if np.abs(off - (off @ self.basis.T) @ self.basis).max() > slack:
            return False
        if self.system is None:
            return False
        a, b = self.system
        return bool(np.all(a @ (off @ self.basis.T) <= b + slack))


def oracle_in_hull(p, ps, tol: float = TOL) -> bool:
    """Membership in conv(ps) through the enumerated facet system."""
    return OracleHull(ps, tol).contains(p)


def oracle_safe_point_exists(ps, n_f: int) -> bool:
    """Whether every ``(n - n_f)``-subset hull has a common interior point.

    Stacks the facet systems of all subsets and maximises a uniform slack
    by linear programming; a strictly positive optimum certifies a point in
    the intersection of all the interiors.
    """
    ps = _points(ps)
    n, d = ps.shape
    if n > SAFE_POINT_LIMIT:
        raise OracleLimitExceeded(f"oracle_safe_point_exists refuses n={n} (limit {SAFE_POINT_LIMIT})")
    if n_f < 0:
        raise ValueError("n_f must be nonnegative")
    keep = n - n_f
    if keep < d + 1:
        return False
    rows, rhs = [], []
    for sub in combinations(range(n), keep):
        system = facets(ps[list(sub)])
        if system is None:
            return False
        rows.append(system[0])
        rhs.append(system[1])
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    # variables (x, t): max t s.t. a x + t <= b, t <= 1
    a_ub = np.hstack([a, np.ones((len(a), 1))])
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    bounds = [(None, None)] * d + [(None, 1.0)]
    res = linprog(cost, A_ub=a_ub, b_ub=b, bounds=bounds, method="highs-ipm")
    if res.status != 0:
        return False
    scale = max(1.0, np.abs(ps).max())
    return bool(res.x[-1] > 1e-7 * scale)


def subset_count(n: int, n_f: int) -> int:
    return comb(n, n - n_f)
