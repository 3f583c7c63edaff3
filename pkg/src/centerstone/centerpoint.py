"""Centerpoints: exact in low dimension, iterated Radon points above that.

The exact routines treat the depth-``k`` region as a polytope. A point ``q``
has depth at least ``k`` iff for every direction ``u`` it lies below the
``k``-th largest projection ``u . x``; the region is cut out by finitely many
such constraints, namely those whose normal is spanned by ``d`` sample points
tied at the ``k``-th level. A linear program then picks a point of it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from math import ceil, comb

import numpy as np
from scipy.optimize import linprog

from centerstone import geometry as geo
from centerstone.geometry import InsufficientPoints

log = logging.getLogger(__name__)

DEFAULT_R = 3
MAX_REJITTER = 5
JITTER = 1e-7


class Method(str, Enum):
    EXACT_2D = "exact-2d"
    EXACT_3D = "exact-3d"
    EXACT = "exact"
    ITERATED_RADON = "iterated-radon"


@dataclass(frozen=True)
class CenterpointResult:
    point: np.ndarray
    guaranteed_depth: int
    method: Method
    interior: bool
    r: int | None = None
    margin: float = 0.0


def centerpoint_bound(n: int, d: int) -> int:
    """Depth guaranteed by the centerpoint theorem, ``ceil(n / (d + 1))``."""
    return -(-n // (d + 1))


def radon_bound(n: int, d: int, r: int) -> int:
    """Depth claimed for the iterated Radon point, ``ceil(n / d^(r/(r-1)))``."""
    return max(1, ceil(n / d ** (r / (r - 1)) - 1e-12))


# -- exact region ----------------------------------------------------------


def _region_constraints(ps: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``(u, c)`` with ``u . q <= c`` for every facet of the depth-k region."""
    n, d = ps.shape
    tol = geo.TOL_RANK * geo.scale_of(ps)
    if d == 1:
        xs = np.sort(ps[:, 0])
        # depth >= k  <=>  x_(k) <= q <= x_(n-k+1)
        return np.array([[1.0], [-1.0]]), np.array([xs[n - k], -xs[k - 1]])
    rows, rhs = [], []
    chunk = max(1000, 4_000_000 // n)
    combos = geo.combination_array(n, d)
    for start in range(0, len(combos), chunk):
        idx = combos[start : start + chunk]
        base = ps[idx[:, 0]]
        normals, ok = geo._null_directions(ps[idx[:, 1:]] - base[:, None, :])
        normals, base = normals[ok], base[ok]
        level = np.einsum("ij,ij->i", normals, base)
        proj = ps @ normals.T - level
        above = np.count_nonzero(proj > tol, axis=0)
        below = np.count_nonzero(proj < -tol, axis=0)
        on = n - above - below
        up = (above < k) & (above + on >= k)
        down = (below < k) & (below + on >= k)
        rows += [normals[up], -normals[down]]
        rhs += [level[up], -level[down]]
    return np.vstack(rows), np.concatenate(rhs)


def _solve_region(ps: np.ndarray, k: int, direction: np.ndarray | None = None):
    """Point of the depth-k region, or None if the LP finds it empty.

    Without ``direction`` the Chebyshev centre is returned together with its
    inscribed radius; with it, a vertex extreme in that direction.
    """
    # LP tolerances are absolute, so work in coordinates centred on the
    # coordinate-wise median and scaled to the typical spread around it; a
    # tight cluster with a few far outliers otherwise hides its region
    origin = np.median(ps, axis=0)
    spread = float(np.median(np.linalg.norm(ps - origin, axis=1)))
    if not spread > 0:
        spread = geo.diameter_of_bbox(ps) or 1.0
    q, radius = _solve_scaled((ps - origin) / spread, k, direction)
    if q is None:
        return None, 0.0
    return origin + spread * q, radius * spread


def _solve_scaled(ps: np.ndarray, k: int, direction):
    a, b = _region_constraints(ps, k)
    n, d = ps.shape
    lo, hi = ps.min(axis=0), ps.max(axis=0)
    box = [(float(l), float(h)) for l, h in zip(lo, hi)]
    if len(a) == 0:
        a, b = np.zeros((1, d)), np.zeros(1)
    if direction is None:
        a_ub = np.hstack([a, np.ones((len(a), 1))])
        cost = np.zeros(d + 1)
        cost[-1] = -1.0
        res = linprog(cost, A_ub=a_ub, b_ub=b, bounds=box + [(None, None)], method="highs-ds")
        if res.status != 0:
            return None, 0.0
        return res.x[:d], float(res.x[d])
    res = linprog(-direction, A_ub=a, b_ub=b, bounds=box, method="highs-ds")
    if res.status != 0:
        return None, 0.0
    return res.x, 0.0


def _region_margin(ps: np.ndarray, k: int, q: np.ndarray) -> float:
    """Distance from ``q`` to the nearest bounding line or plane of the depth-k region."""
    a, b = _region_constraints(ps, k)
    if len(a) == 0:
        return np.inf
    return float((b - a @ q).min())


def _snap(q: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """``q`` replaced by a sample point it coincides with up to tol_rank."""
    gaps = np.linalg.norm(ps - q, axis=1)
    i = int(np.argmin(gaps))
    return ps[i].copy() if gaps[i] <= geo.TOL_RANK * geo.scale_of(ps) else q


def _exact(ps: np.ndarray, k: int, seed: int, use_jitter: bool, direction=None):
    """Depth-k point of ``ps`` checked against the unperturbed input."""
    # the raw input is tried first; ties that break the region are caught by
    # the depth check and retried on a jittered copy. A region that shrinks
    # to a sample point comes back from the LP a rounding error away from
    # it, so such answers are snapped onto the point itself
    q, radius = _solve_region(ps, k, direction)
    if q is not None and geo.depth(q, ps) >= k:
        return _snap(q, ps), radius
    if use_jitter:
        q, radius = _solve_region(geo.jitter(ps, seed, JITTER), k, direction)
        if q is not None and geo.depth(q, ps) >= k:
            return _snap(q, ps), radius
    # a region thinner than the tolerances (near-coincident, near-collinear
    # input) can defeat the LP; the deepest sample point is then the fallback
    depths = [geo.depth(x, ps) for x in ps]
    best = int(np.argmax(depths))
    if depths[best] >= k:
        return ps[best].copy(), 0.0
    return None, 0.0


def exact_centerpoint(ps, k: int | None = None, seed: int = 0, use_jitter: bool = True) -> CenterpointResult:
    """Chebyshev centre of the depth-``k`` region (default ``ceil(n/(d+1))``)."""
    ps = geo.as_pointset(ps)
    n, d = ps.shape
    if k is None:
        k = centerpoint_bound(n, d)
    q, radius = _exact(ps, k, seed, use_jitter)
    if q is None:
        raise geo.GeometryError(f"no point of depth {k} found for n={n}, d={d}")
    scale = geo.diameter_of_bbox(ps) or 1.0
    method = {2: Method.EXACT_2D, 3: Method.EXACT_3D}.get(d, Method.EXACT)
    return CenterpointResult(
        point=q,
        guaranteed_depth=k,
        method=method,
        interior=radius > geo.TOL_INTERIOR * scale,
        margin=radius,
    )


def centerpoint_2d(ps, seed: int = 0, use_jitter: bool = True) -> CenterpointResult:
    ps = geo.as_pointset(ps, 2)
    if len(ps) < 3:
        raise InsufficientPoints(f"planar centerpoint needs at least 3 points, got {len(ps)}")
    return exact_centerpoint(ps, seed=seed, use_jitter=use_jitter)


def centerpoint_3d(ps, seed: int = 0, use_jitter: bool = True) -> CenterpointResult:
    ps = geo.as_pointset(ps, 3)
    if len(ps) < 4:
        raise InsufficientPoints(f"spatial centerpoint needs at least 4 points, got {len(ps)}")
    return exact_centerpoint(ps, seed=seed, use_jitter=use_jitter)


def interior_centerpoint(ps, dim: int, seed: int = 0) -> CenterpointResult:
    """Centroid of ``dim + 1`` centerpoints of independently jittered copies.

    Each copy contributes the vertex of its depth region that is extreme in a
    seeded random direction. The centroid is reported interior when those
    vertices span a full simplex; otherwise the copies are re-jittered with
    fresh seeds, up to ``MAX_REJITTER`` times.
    """
    ps = geo.as_pointset(ps, dim)
    n, d = ps.shape
    if dim not in (2, 3):
        raise ValueError("interior_centerpoint supports dim 2 or 3")
    if n < d + 1:
        raise InsufficientPoints(f"need at least {d + 1} points in dimension {d}, got {n}")
    k = centerpoint_bound(n, d)
    method = Method.EXACT_2D if d == 2 else Method.EXACT_3D
    for attempt in range(MAX_REJITTER + 1):
        corners = []
        for copy in range(d + 1):
            sub_seed = [seed, attempt, copy]
            rng = np.random.default_rng(sub_seed)
            work = geo.jitter(ps, int(rng.integers(2**31)), JITTER)
            direction = rng.normal(size=d)
            q, _ = _solve_region(work, k, direction)
            if q is not None:
                corners.append(q)
        if len(corners) < d + 1:
            continue
        corners = np.array(corners)
        center = corners.mean(axis=0)
        if geo.depth(center, ps) < k:
            continue
        spread = geo.diameter_of_bbox(ps) or 1.0
        if geo.affine_rank(corners / spread, tol=1e-6) < d:
            continue
        margin = _region_margin(ps, k, center)
        if margin > geo.TOL_INTERIOR * spread:
            return CenterpointResult(center, k, method, interior=True, margin=margin)
    log.debug("interior centerpoint fell back to the Chebyshev centre")
    res = exact_centerpoint(ps, k, seed=seed)
    return CenterpointResult(res.point, k, method, interior=False, margin=res.margin)


# -- iterated Radon --------------------------------------------------------

MAX_LEAVES = 1 << 21
CERTIFY_BUDGET = 200_000
MAX_ATTEMPTS = 8


def tree_levels(n: int, d: int, r: int) -> int:
    """Height of the Radon tree: enough to cover ``n`` leaves plus ``r`` extra levels."""
    g = d + 2
    base = 0
    while g**base < n:
        base += 1
    levels = base + r
    while levels > 1 and g**levels > MAX_LEAVES:
        levels -= 1
    return levels


def iterated_radon_centerpoint(ps, r: int = DEFAULT_R, seed: int = 0, certify: bool = True) -> CenterpointResult:
    """Approximate centerpoint by repeated Radon reduction.

    The leaves of a complete ``(d+2)``-ary tree are filled by sampling the
    input with replacement (every level re-jittered by ``JITTER`` relative
    to the bounding box so batches stay in general position); each level
    replaces every batch of ``d + 2`` points by its Radon point until one
    point is left. Larger ``r`` means a taller tree.

    With ``certify`` the exact depth of the result is checked whenever that
    is affordable, and the tree is regrown from fresh seeds until the
    ``ceil(n / d^(r/(r-1)))`` bound holds; the deepest candidate is returned
    if every attempt falls short.
    """
    ps = geo.as_pointset(ps)
    n, d = ps.shape
    if r < 2:
        raise ValueError("r must be an integer > 1")
    if n < d + 2:
        raise InsufficientPoints(f"iterated Radon needs at least {d + 2} points in dimension {d}, got {n}")
    bound = radon_bound(n, d, r)
    if n == d + 2:
        # one batch: its Radon point has depth at least 2, which meets the bound
        try:
            return CenterpointResult(geo.radon_point(ps).witness, bound, Method.ITERATED_RADON, interior=False, r=r)
        except geo.DegenerateInput:
            pass
    levels = tree_levels(n, d, r)
    check = certify and comb(n, max(d - 1, 0)) <= CERTIFY_BUDGET
    best, best_depth = None, -1
    for attempt in range(MAX_ATTEMPTS if check else 1):
        q = _radon_tree(ps, levels, np.random.default_rng([seed, attempt, n, d]))
        if not check:
            best = q
            break
        k = geo.depth(q, ps)
        if k > best_depth:
            best, best_depth = q, k
        if k >= bound:
            break
    else:
        log.warning("iterated Radon point reached depth %d < %d after %d attempts", best_depth, bound, MAX_ATTEMPTS)
    return CenterpointResult(
        point=best,
        guaranteed_depth=bound,
        method=Method.ITERATED_RADON,
        interior=False,
        r=r,
    )


def _radon_tree(ps: np.ndarray, levels: int, rng: np.random.Generator) -> np.ndarray:
    n, d = ps.shape
    g = d + 2
    size = max(geo.diameter_of_bbox(ps), 1e-12)
    work = ps[rng.integers(n, size=g**levels)]
    while len(work) > 1:
        work = work + JITTER * size * rng.uniform(-1.0, 1.0, work.shape)
        batches = work.reshape(-1, g, d)
        work, degenerate = geo.radon_witnesses(batches)
        # a batch that stays degenerate after jitter collapses to its centroid
        work[degenerate] = batches[degenerate].mean(axis=1)
    return work[0]
