"""Centers used as coreset-builder inputs.

Provides the exact 1-d robust geometric median (contiguous-window
sweep), k-means++ style seeding, and a Lloyd-style alternation that
re-splits outliers each round.  The Lloyd variant accepts per-point
weights so it can also be run on weighted coresets.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass

import numpy as np

from rcoreset.core import CenterSet, as_points

__all__ = [
    "SolveResult",
    "kmeanspp_seed",
    "lloyd_with_outliers",
    "robust_median_1d",
]


@dataclass(frozen=True)
class SolveResult:
    """A solver outcome: centers plus the robust cost they achieve."""

    centers: CenterSet
    cost: float
    inlier_window: tuple[int, int] | None
    iterations: int


def robust_median_1d(P, m: int) -> SolveResult:
    """Exact robust geometric median on the line.

    The optimal inlier set is a contiguous window of n - m consecutive
    points and the optimal center is a median of that window; scanning
    all m + 1 windows with prefix sums takes O(n).  Window cost ties are
    broken toward the smallest left index and the reported center is the
    lower median of the winning window.
    """
    pts = np.asarray(P, dtype=np.float64).reshape(-1)
    n = len(pts)
    m = operator.index(m)
    if not 0 <= m < n:
        raise ValueError(f"need 0 <= m < |P|, got m={m}, |P|={n}")
    if n > 1 and np.any(np.diff(pts) < 0):
        raise ValueError("P must be sorted ascending")
    length = n - m
    prefix = np.concatenate(([0.0], np.cumsum(pts)))
    lefts = np.arange(m + 1)
    med = lefts + (length - 1) // 2
    centers = pts[med]
    left_cnt = med - lefts + 1
    sum_left = prefix[med + 1] - prefix[lefts]
    sum_right = prefix[lefts + length] - prefix[med + 1]
    costs = centers * left_cnt - sum_left + sum_right - centers * (length - left_cnt)
    best = int(np.argmin(costs))
    left, right = best, best + length - 1
    center = float(pts[best + (length - 1) // 2])
    cost = float(np.sum(np.abs(pts[left : right + 1] - center)))
    return SolveResult(
        centers=CenterSet([[center]], z=1),
        cost=cost,
        inlier_window=(left, right),
        iterations=0,
    )


def _weighted_draw(rng: np.random.Generator, mass: np.ndarray) -> int:
    """Index drawn with probability proportional to mass (sum > 0)."""
    cum = np.cumsum(mass)
    r = rng.random() * cum[-1]
    return int(np.clip(np.searchsorted(cum, r, side="right"), 0, len(mass) - 1))


def _dist_pow_to_set(points: np.ndarray, centers: np.ndarray, z: int) -> np.ndarray:
    best = None
    for c in centers:
        diff = points - c
        d2 = np.einsum("ij,ij->i", diff, diff)
        best = d2 if best is None else np.minimum(best, d2)
    return np.sqrt(best) if z == 1 else best


def kmeanspp_seed(P, k: int, z: int, seed, weights=None) -> CenterSet:
    """k distinct input points, each round drawn with mass dist(·, chosen)^z.

    Optional per-point weights multiply the sampling mass so the seeding
    can run on weighted coresets.  Deterministic given the seed.
    """
    points = as_points(P)
    n = len(points)
    k = operator.index(k)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= |P|, got k={k}, |P|={n}")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    if len(w) != n:
        raise ValueError(f"{n} points but {len(w)} weights")
    rng = np.random.default_rng(seed)
    chosen = [_weighted_draw(rng, w)]
    dpow = None
    for _ in range(1, k):
        diff = points - points[chosen[-1]]
        d2 = np.einsum("ij,ij->i", diff, diff)
        latest = np.sqrt(d2) if z == 1 else d2
        dpow = latest if dpow is None else np.minimum(dpow, latest)
        mass = dpow * w
        total = float(mass.sum())
        if total > 0.0:
            chosen.append(_weighted_draw(rng, mass))
        else:  # every remaining point coincides with a chosen center
            unchosen = np.setdiff1d(np.arange(n), np.array(chosen, dtype=int))
            chosen.append(int(unchosen[rng.integers(len(unchosen))]))
    return CenterSet(points[np.array(chosen, dtype=int)], z=z)


def _greedy_budget_fill(dmin_pow: np.ndarray, w: np.ndarray, budget: float) -> np.ndarray:
    """Kept weight per point: fill budget nearest-first, one fractional split."""
    kept = np.zeros(len(w))
    if budget <= 0.0:
        return kept
    order = np.argsort(dmin_pow, kind="stable")
    cum = np.cumsum(w[order])
    full = int(np.searchsorted(cum, budget, side="right"))
    kept[order[:full]] = w[order[:full]]
    if full < len(w):
        rem = budget - (cum[full - 1] if full else 0.0)
        kept[order[full]] = min(max(rem, 0.0), w[order[full]])
    return kept


def _weighted_column_median(values: np.ndarray, w: np.ndarray) -> float:
    """Smallest value whose cumulative weight reaches half the total."""
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(w[order])
    half = 0.5 * cum[-1]
    return float(values[order[np.searchsorted(cum, half, side="left")]])


def lloyd_with_outliers(
    P,
    k: int,
    m,
    z: int,
    max_iters: int = 50,
    seed=0,
    *,
    init: CenterSet | None = None,
    weights=None,
) -> SolveResult:
    """Lloyd alternation with the m farthest (weight units) set aside.

    Each iteration splits off m units of outlier weight at the current
    centers, assigns the kept weight to nearest centers, and recenters
    (mean for z=2; coordinate-wise weighted median for z=1, kept only
    when it does not worsen the cluster, so the cost never increases).
    Empty clusters are reseeded from the farthest kept point.
    """
    points = as_points(P)
    n = len(points)
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    total = float(np.sum(w))
    m = float(m)
    if not 0 <= m < total:
        raise ValueError(f"need 0 <= m < total weight {total}, got m={m}")
    if init is not None:
        if len(init) != k or init.dim != points.shape[1]:
            raise ValueError("init must supply k centers of matching dimension")
        centers = init.centers.copy()
    else:
        centers = kmeanspp_seed(points, k, z, seed, weights=w).centers.copy()
    budget = total - m

    def split_cost(ctrs: np.ndarray) -> float:
        dmin = _dist_pow_to_set(points, ctrs, z)
        kept = _greedy_budget_fill(dmin, w, budget)
        return float(np.sum(kept * dmin))

    prev_cost = split_cost(centers)
    iterations = 0
    for _ in range(max_iters):
        dpow = np.stack([_dist_pow_to_set(points, c[None, :], z) for c in centers], axis=1)
        nearest = np.argmin(dpow, axis=1)
        dmin = dpow[np.arange(n), nearest]
        kept = _greedy_budget_fill(dmin, w, budget)
        new_centers = centers.copy()
        for j in range(k):
            mask = (nearest == j) & (kept > 0)
            cw = kept[mask]
            if cw.sum() <= 0.0:
                alive = kept > 0
                far = int(np.argmax(np.where(alive, dmin, -np.inf)))
                new_centers[j] = points[far]
                continue
            cluster = points[mask]
            if z == 2:
                new_centers[j] = np.average(cluster, axis=0, weights=cw)
            else:
                proposal = np.array(
                    [_weighted_column_median(cluster[:, t], cw) for t in range(cluster.shape[1])]
                )
                now = float(np.sum(cw * np.linalg.norm(cluster - centers[j], axis=1)))
                new = float(np.sum(cw * np.linalg.norm(cluster - proposal, axis=1)))
                if new <= now:
                    new_centers[j] = proposal
        centers = new_centers
        iterations += 1
        cost = split_cost(centers)
        if prev_cost - cost <= 1e-9 * max(prev_cost, 1e-300):
            prev_cost = min(prev_cost, cost)
            break
        prev_cost = cost
    return SolveResult(
        centers=CenterSet(centers, z=z),
        cost=prev_cost,
        inlier_window=None,
        iterations=iterations,
    )
