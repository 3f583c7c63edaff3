"""Primitive geometry shared by the safe-point algorithms.

Points are plain ``numpy`` arrays of shape ``(d,)`` and point sets are arrays
of shape ``(n, d)``. Everything here is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

TOL_RANK = 1e-9
TOL_FEAS = 1e-9
TOL_INTERIOR = 1e-7

_CHUNK = 200_000


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DimensionMismatch(GeometryError):
    pass


class DegenerateInput(GeometryError):
    """Raised when an operation needs general position and did not get it."""


class InsufficientPoints(GeometryError):
    pass


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space ``{x : normal . x >= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        a = np.asarray(self.normal, dtype=float)
        if a.ndim != 1 or not np.all(np.isfinite(a)) or np.linalg.norm(a) == 0:
            raise GeometryError("half-space normal must be a finite nonzero vector")
        object.__setattr__(self, "normal", a)

    def contains(self, x) -> bool:
        return float(self.normal @ np.asarray(x, dtype=float)) >= self.offset

    def count(self, ps) -> int:
        return int(np.count_nonzero(as_pointset(ps) @ self.normal >= self.offset))


@dataclass(frozen=True)
class RadonPartition:
    part_a: tuple[int, ...]
    part_b: tuple[int, ...]
    witness: np.ndarray
    weights_a: np.ndarray
    weights_b: np.ndarray


def as_pointset(ps, dim: int | None = None) -> np.ndarray:
    try:
        arr = np.asarray(ps, dtype=float)
    except ValueError:
        raise DimensionMismatch("points in a point set must share one dimension") from None
    if arr.ndim == 1:
        arr = arr[:, None] if dim == 1 else arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise GeometryError(f"expected a nonempty (n, d) point set, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("point coordinates must be finite")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[1]}")
    return arr


def as_point(p, dim: int | None = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if arr.ndim != 1:
        raise GeometryError(f"expected a point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("point coordinates must be finite")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"point has dimension {arr.shape[0]}, point set has {dim}")
    return arr


def scale_of(ps: np.ndarray) -> float:
    """Coordinate magnitude used to turn relative tolerances into absolute ones."""
    return max(1.0, float(np.abs(ps).max()))


def diameter_of_bbox(ps: np.ndarray) -> float:
    return float(np.linalg.norm(ps.max(axis=0) - ps.min(axis=0)))


def combination_array(n: int, k: int) -> np.ndarray:
    """All ``k``-subsets of ``range(n)`` in lexicographic order, one per row."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.intp)
    combos = np.arange(n, dtype=np.intp)[:, None]
    for _ in range(k - 1):
        last = combos[:, -1]
        counts = n - 1 - last
        total = int(counts.sum())
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        fresh = np.repeat(last, counts) + 1 + (np.arange(total) - starts)
        combos = np.hstack([np.repeat(combos, counts, axis=0), fresh[:, None]])
    return combos


def _combination_chunks(n: int, k: int, size: int = _CHUNK):
    combos = combination_array(n, k)
    for start in range(0, len(combos), size):
        yield combos[start : start + size]


def affine_rank(ps: np.ndarray, tol: float = TOL_RANK) -> int:
    ps = as_pointset(ps)
    if ps.shape[0] == 1:
        return 0
    diffs = ps[1:] - ps[0]
    s = np.linalg.svd(diffs, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * max(s[0], scale_of(ps) * TOL_RANK)))


def is_general_position(ps) -> bool:
    """True iff every ``d+1`` points of ``ps`` are affinely independent.

    A subset is treated as dependent when the volume of its difference
    simplex falls below ``TOL_RANK`` times the Hadamard bound of its edges.
    """
    ps = as_pointset(ps)
    n, d = ps.shape
    if n <= d + 1:
        return affine_rank(ps) == n - 1
    for idx in _combination_chunks(n, d + 1):
        base = ps[idx[:, 0]]
        edges = ps[idx[:, 1:]] - base[:, None, :]
        vol = np.abs(_det(edges))
        bound = np.prod(np.sqrt(np.einsum("ijk,ijk->ij", edges, edges)), axis=1)
        if np.any(vol <= TOL_RANK * bound) or np.any(bound == 0):
            return False
    return True


def _det(m: np.ndarray) -> np.ndarray:
    k = m.shape[-1]
    if k == 1:
        return m[:, 0, 0]
    if k == 2:
        return m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    if k == 3:
        return np.einsum("ij,ij->i", m[:, 0], np.cross(m[:, 1], m[:, 2]))
    if k == 4:
        # complementary 2x2 minors of rows (0, 1) and (2, 3)
        a, b = m[:, 0], m[:, 1]
        c, e = m[:, 2], m[:, 3]
        total = np.zeros(len(m))
        for (i, j), sign in zip(_PAIRS4, (1, -1, 1, 1, -1, 1)):
            p, q = _PAIRS4[5 - _PAIRS4.index((i, j))]
            top = a[:, i] * b[:, j] - b[:, i] * a[:, j]
            total += sign * top * (c[:, p] * e[:, q] - e[:, p] * c[:, q])
        return total
    return np.linalg.det(m)


_PAIRS4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


# -- depth -----------------------------------------------------------------


def depth(p, ps) -> int:
    """Tukey (half-space) depth of ``p`` with respect to ``ps``.

    The number of sample points in the emptiest closed half-space whose
    boundary passes through ``p``. Sample points coincident with ``p`` lie in
    every such half-space; the others are reduced to unit directions and the
    minimum is taken over the cells of their great-sphere arrangement.
    """
    ps = as_pointset(ps)
    p = as_point(p, ps.shape[1])
    v = ps - p
    norms = np.linalg.norm(v, axis=1)
    at_p = norms <= TOL_RANK * max(scale_of(ps), float(np.abs(p).max(initial=1.0)))
    u = v[~at_p] / norms[~at_p, None]
    return int(np.count_nonzero(at_p)) + _open_cell_min(u)


def _open_cell_min(u: np.ndarray) -> int:
    """Minimum over generic directions w of #{rows with w . u > 0}."""
    m = u.shape[0]
    if m == 0:
        return 0
    _, s, vt = np.linalg.svd(u, full_matrices=False)
    k = int(np.count_nonzero(s > TOL_RANK * max(s[0], 1.0)))
    w = u @ vt[:k].T
    if k == 1:
        pos = int(np.count_nonzero(w[:, 0] > 0))
        return min(pos, m - pos)
    best = m
    for idx in _combination_chunks(m, k - 1):
        normals, ok = _null_directions(w[idx])
        if not np.any(ok):
            continue
        idx, normals = idx[ok], normals[ok]
        dots = normals @ w.T
        pos = np.count_nonzero(dots > TOL_RANK, axis=1)
        neg = np.count_nonzero(dots < -TOL_RANK, axis=1)
        zero = m - pos - neg
        base = np.minimum(pos, neg)
        clean = zero == k - 1
        if np.any(clean):
            best = min(best, int(base[clean].min()))
        for j in np.flatnonzero(~clean):
            if base[j] >= best:
                continue
            on_plane = np.abs(dots[j]) <= TOL_RANK
            best = min(best, int(base[j]) + _open_cell_min(w[on_plane]))
        if best == 0:
            break
    return best


def _null_directions(rows: np.ndarray):
    """Unit vector orthogonal to each stack of ``k-1`` rows in ``R^k``."""
    c, km1, k = rows.shape
    if k == 2:
        n = np.stack([-rows[:, 0, 1], rows[:, 0, 0]], axis=1)
        ok = np.linalg.norm(n, axis=1) > TOL_RANK
    elif k == 3:
        n = np.cross(rows[:, 0], rows[:, 1])
        ok = np.linalg.norm(n, axis=1) > TOL_RANK
    else:
        n = np.empty((c, k))
        for j in range(k):
            n[:, j] = (-1) ** j * _det(np.delete(rows, j, axis=2))
        scale = np.prod(np.sqrt(np.einsum("ijk,ijk->ij", rows, rows)), axis=1)
        ok = np.linalg.norm(n, axis=1) > TOL_RANK * np.maximum(scale, TOL_RANK)
    norm = np.linalg.norm(n, axis=1)
    norm[norm == 0] = 1.0
    return n / norm[:, None], ok


# -- hull membership -------------------------------------------------------


def in_convex_hull(p, ps, strict: bool = False) -> bool:
    """Whether ``p`` is a convex combination of ``ps``.

    With ``strict=True`` the point must also be interior: the hull has to be
    full-dimensional and ``p`` must admit convex weights that are all at least
    ``TOL_INTERIOR``.
    """
    ps = as_pointset(ps)
    p = as_point(p, ps.shape[1])
    if strict:
        if affine_rank(ps) < ps.shape[1]:
            return False
        return _weight_margin(p, ps) >= TOL_INTERIOR
    return _hull_residual(p, ps) <= TOL_FEAS * scale_of(ps)


def convex_weights(p, ps) -> np.ndarray | None:
    """Convex weights reproducing ``p`` from ``ps``, or None if infeasible."""
    ps = as_pointset(ps)
    p = as_point(p, ps.shape[1])
    n, d = ps.shape
    # min sum(e+ + e-) s.t. ps^T lam + e+ - e- = p, sum lam = 1
    a_eq = np.zeros((d + 1, n + 2 * d))
    a_eq[:d, :n] = ps.T
    a_eq[:d, n : n + d] = np.eye(d)
    a_eq[:d, n + d :] = -np.eye(d)
    a_eq[d, :n] = 1.0
    c = np.r_[np.zeros(n), np.ones(2 * d)]
    res = linprog(c, A_eq=a_eq, b_eq=np.r_[p, 1.0], bounds=(0, None), method="highs-ds")
    if res.status != 0:
        return None
    lam = np.clip(res.x[:n], 0, None)
    lam /= lam.sum()
    if np.abs(lam @ ps - p).max() > TOL_FEAS * scale_of(ps):
        return None
    return lam


def _hull_residual(p: np.ndarray, ps: np.ndarray) -> float:
    lam = convex_weights(p, ps)
    if lam is None:
        return np.inf
    return float(np.abs(lam @ ps - p).max())


def _weight_margin(p: np.ndarray, ps: np.ndarray) -> float:
    # max t s.t. ps^T lam = p, sum lam = 1, lam >= t
    n, d = ps.shape
    a_eq = np.zeros((d + 1, n + 1))
    a_eq[:d, :n] = ps.T
    a_eq[d, :n] = 1.0
    a_ub = np.zeros((n, n + 1))
    a_ub[:, :n] = -np.eye(n)
    a_ub[:, n] = 1.0
    c = np.zeros(n + 1)
    c[n] = -1.0
    bounds = [(None, None)] * n + [(None, 1.0)]
    res = linprog(
        c, A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=np.r_[p, 1.0],
        bounds=bounds, method="highs-ds",
    )
    if res.status != 0:
        return -np.inf
    return float(res.x[n])


class HullMembership:
    """Reusable membership test against one fixed hull.

    Uses the facet representation when the hull is full-dimensional and falls
    back to :func:`in_convex_hull` for points inside the tolerance band.
    """

    def __init__(self, ps):
        self.points = as_pointset(ps)
        self._scale = scale_of(self.points)
        self._eq = None
        n, d = self.points.shape
        if d >= 2 and n > d and affine_rank(self.points) == d:
            try:
                self._eq = ConvexHull(self.points).equations
            except QhullError:
                self._eq = None

    def contains(self, xs) -> np.ndarray:
        xs = as_pointset(xs, self.points.shape[1])
        out = np.zeros(len(xs), dtype=bool)
        if self._eq is not None:
            slack = xs @ self._eq[:, :-1].T + self._eq[:, -1]
            worst = slack.max(axis=1)
            band = 1e-7 * self._scale
            out[worst <= -band] = True
            undecided = np.flatnonzero(np.abs(worst) < band)
        elif self.points.shape[1] == 1:
            lo, hi = self.points.min(), self.points.max()
            tol = TOL_FEAS * self._scale
            return (xs[:, 0] >= lo - tol) & (xs[:, 0] <= hi + tol)
        else:
            undecided = np.arange(len(xs))
        for i in undecided:
            out[i] = in_convex_hull(xs[i], self.points)
        return out


# -- Radon points ----------------------------------------------------------


def radon_point(ps) -> RadonPartition:
    """Radon partition of ``d+2`` points in ``R^d`` and its intersection point.

    The partition follows the signs of the affine dependence; ``part_a`` is
    the smaller side, or the side holding index 0 on a tie.
    """
    ps = as_pointset(ps)
    n, d = ps.shape
    if n != d + 2:
        raise GeometryError(f"Radon point needs exactly {d + 2} points in dimension {d}, got {n}")
    m = np.vstack([ps.T, np.ones(n)])
    _, s, vt = np.linalg.svd(m)
    # m is (d+1) x (d+2): the null space is at least one-dimensional
    if s[-1] <= TOL_RANK * max(s[0], 1.0):
        raise DegenerateInput("affine dependence of the Radon input is not unique")
    c = vt[-1]
    c = c / np.abs(c).max()
    pos = c > TOL_RANK
    neg = ~pos
    a_idx, b_idx = np.flatnonzero(pos), np.flatnonzero(neg)
    wa = np.where(pos, c, 0.0)
    wa /= wa.sum()
    wb = np.where(neg, -c, 0.0)
    wb /= wb.sum()
    if len(b_idx) < len(a_idx) or (len(a_idx) == len(b_idx) and b_idx[0] == 0):
        a_idx, b_idx, wa, wb = b_idx, a_idx, wb, wa
    witness = wa @ ps
    return RadonPartition(
        part_a=tuple(int(i) for i in a_idx),
        part_b=tuple(int(i) for i in b_idx),
        witness=witness,
        weights_a=wa,
        weights_b=wb,
    )


def radon_witnesses(batches) -> tuple[np.ndarray, np.ndarray]:
    """Radon points of a stack of ``(m, d+2, d)`` batches at once.

    Returns the witnesses and a mask of batches whose affine dependence was
    not unique; witnesses of those rows are unreliable and left to the caller.
    """
    batches = np.asarray(batches, dtype=float)
    m, g, d = batches.shape
    if g != d + 2:
        raise GeometryError(f"Radon batches need {d + 2} points in dimension {d}, got {g}")
    mats = np.concatenate([batches.transpose(0, 2, 1), np.ones((m, 1, g))], axis=1)
    _, s, vt = np.linalg.svd(mats)
    degenerate = s[:, -1] <= TOL_RANK * np.maximum(s[:, 0], 1.0)
    c = vt[:, -1, :]
    pos = np.where(c > 0, c, 0.0)
    total = pos.sum(axis=1)
    total[total == 0] = 1.0
    witnesses = np.einsum("mg,mgd->md", pos / total[:, None], batches)
    return witnesses, degenerate


# -- jitter ----------------------------------------------------------------


def jitter(ps, seed: int, magnitude: float = 1e-7) -> np.ndarray:
    """Deterministic perturbation of relative size ``magnitude``.

    Point ``i`` is displaced by a vector drawn from the stream keyed by
    ``(seed, i)``, so the result does not depend on how many points follow.
    """
    ps = as_pointset(ps)
    n, d = ps.shape
    size = magnitude * max(diameter_of_bbox(ps), TOL_RANK * scale_of(ps), 1e-12)
    out = ps.copy()
    for i in range(n):
        rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, i])
        out[i] += size * rng.uniform(-1.0, 1.0, d)
    return out
