"""Coresets for the robust geometric median on the line.

The robust builder keeps three zones of the sorted input: the middle
n - 2m points are compressed by the vanilla 1-d coreset subroutine, and
the m-point fringes on each side are partitioned into distance blocks
around the anchors c_L = c* - r_max and c_R = c* + r_max (c* the exact
robust median, r_max its inlier radius).  Each block is chopped greedily
into buckets whose cumulative error and size stay below level-scaled
caps, buckets are realigned with the inlier windows of the two boundary
centers, and every bucket is emitted as (mean, count).

The vanilla subroutine reuses the same block/bucket machinery centered
at the plain median with scale r_bar (the average absolute deviation).
Its far region is realised as extra levels continuing past the nominal
top level so that distant mass stays error-capped in proportion to its
distance; the cap constant is a tunable knob.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

from rcoreset.core import AssumptionViolationError, WeightedSet
from rcoreset.solver import robust_median_1d

__all__ = [
    "Block",
    "BlockPartition",
    "Bucket",
    "Robust1dBuild",
    "boundary_split",
    "bucket_stats",
    "build_robust_1d",
    "build_robust_1d_full",
    "build_vanilla_1d",
    "partition_blocks",
    "split_block",
    "DEFAULT_DELTA_CONSTANT",
]

# Denominator of the per-level cumulative-error caps.  Smaller values
# loosen the caps (fewer buckets, larger error); the default matches the
# published robust-side cap and is reused by the vanilla subroutine.
DEFAULT_DELTA_CONSTANT = 288.0

_OUTWARD_SIDES = ("L", "R")  # sides where a far region exists


@dataclass(frozen=True)
class Bucket:
    """A contiguous index range of the sorted dataset with its summary."""

    l: int
    r: int
    count: int
    mean: float
    cum_err: float


@dataclass(frozen=True)
class Block:
    """A contiguous run of fringe points sharing one distance class.

    ``data`` is the side array the indices refer to (l, r inclusive);
    ``level`` is None for far blocks.
    """

    data: np.ndarray
    l: int
    r: int
    side: str  # 'L' or 'LR' (left fringe), 'RL' or 'R' (right fringe)
    level: int | None

    @property
    def far(self) -> bool:
        return self.level is None


@dataclass(frozen=True)
class BlockPartition:
    """Distance-class decomposition of both fringes around the anchors."""

    far_left: list[Block]
    far_right: list[Block]
    inner: dict[tuple[str, int], Block]
    c_L: float
    c_R: float
    r_max: float

    def all_blocks(self) -> list[Block]:
        return [*self.far_left, *self.far_right, *self.inner.values()]


def bucket_stats(P_sorted, l: int, r: int) -> Bucket:
    """Summarise the inclusive index range [l, r] of a sorted array."""
    pts = np.asarray(P_sorted, dtype=np.float64).reshape(-1)
    l = operator.index(l)
    r = operator.index(r)
    if not 0 <= l <= r < len(pts):
        raise ValueError(f"bucket range [{l}, {r}] out of bounds for n={len(pts)}")
    chunk = pts[l : r + 1]
    mean = float(np.mean(chunk))
    return Bucket(
        l=l,
        r=r,
        count=r - l + 1,
        mean=mean,
        cum_err=float(np.sum(np.abs(chunk - mean))),
    )


def _level_edges(eps: float, scale: float, top_level: int) -> np.ndarray:
    """Upper edges of levels 0..top_level: edge[i] = 2^(i+1) * eps * scale."""
    return (2.0 ** np.arange(1, top_level + 2)) * eps * scale


def _classify_levels(dists: np.ndarray, eps: float, scale: float, top_level: int) -> np.ndarray:
    """Level index per distance: level 0 below 2*eps*scale, then doubling.

    Distances at or above the top edge are clamped to the top level
    (reachable only in degenerate or override regimes).
    """
    edges = _level_edges(eps, scale, top_level)
    return np.minimum(np.searchsorted(edges, dists, side="right"), top_level)


def _runs(labels: np.ndarray) -> list[tuple[int, int, int]]:
    """Maximal constant runs of labels as (label, start, stop_inclusive)."""
    if len(labels) == 0:
        return []
    breaks = np.flatnonzero(np.diff(labels)) + 1
    starts = np.concatenate(([0], breaks))
    stops = np.concatenate((breaks - 1, [len(labels) - 1]))
    return [(int(labels[a]), int(a), int(b)) for a, b in zip(starts, stops)]


def partition_blocks(P_L, P_R, c_L: float, c_R: float, r_max: float, eps: float) -> BlockPartition:
    """Classify both fringes into far blocks and doubling distance levels.

    Left fringe: points strictly below c_L are far once their distance
    to c_L reaches r_max, otherwise they join level i with
    2^i * eps * r_max <= dist < 2^(i+1) * eps * r_max (side 'L'); points
    at or above c_L join the same levels by distance on side 'LR'.  The
    right fringe mirrors this around c_R with sides 'R' and 'RL' (the
    point exactly at c_R counts as 'RL').  Block indices are local to
    the fringe array they came from.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if r_max < 0:
        raise ValueError("r_max must be nonnegative")
    left = np.asarray(P_L, dtype=np.float64).reshape(-1)
    right = np.asarray(P_R, dtype=np.float64).reshape(-1)
    top = max(1, math.ceil(math.log2(1.0 / eps)))
    far_left: list[Block] = []
    far_right: list[Block] = []
    inner: dict[tuple[str, int], Block] = {}

    def classify_side(values: np.ndarray, anchor: float, side_out: str, side_in: str) -> None:
        if len(values) == 0:
            return
        mask_out = values < anchor if side_out == "L" else values > anchor
        dist = np.abs(values - anchor)
        is_far = mask_out & (dist >= r_max)
        labels = np.where(
            is_far,
            -1,
            _classify_levels(dist, eps, r_max, top) if r_max > 0 else 0,
        )
        base_side = np.where(mask_out, 0, 1)  # 0 = outward side, 1 = inward side
        if r_max == 0.0:
            # Degenerate limit: level intervals are empty, inward points
            # all sit at distance 0 and join level 0; outward points with
            # positive distance fall back to the top level.
            labels = np.where(is_far, -1, np.where(dist > 0, top, 0))
        combined = base_side * (top + 2) + labels  # unique label per (side, class)
        for _, start, stop in _runs(combined):
            far = bool(labels[start] == -1)
            side = side_out if base_side[start] == 0 else side_in
            if far:
                blk = Block(values, start, stop, side, None)
                (far_left if side == "L" else far_right).append(blk)
            else:
                level = int(labels[start])
                blk = Block(values, start, stop, side, level)
                key = (side, level)
                assert key not in inner, f"distance class {key} split across runs"
                inner[key] = blk

    classify_side(left, c_L, "L", "LR")
    classify_side(right, c_R, "R", "RL")
    return BlockPartition(
        far_left=far_left,
        far_right=far_right,
        inner=inner,
        c_L=float(c_L),
        c_R=float(c_R),
        r_max=float(r_max),
    )


def _delta_of_range(pts: np.ndarray, prefix: np.ndarray, l: int, r: int) -> float:
    """Cumulative error of pts[l..r] via prefix sums, O(log) per call."""
    cnt = r - l + 1
    total = prefix[r + 1] - prefix[l]
    mu = total / cnt
    j = min(max(int(np.searchsorted(pts, mu, side="right")), l), r + 1)
    below = mu * (j - l) - (prefix[j] - prefix[l])
    above = (prefix[r + 1] - prefix[j]) - mu * (r + 1 - j)
    return float(below + above)


def _greedy_ranges(
    pts: np.ndarray,
    prefix: np.ndarray,
    l: int,
    r: int,
    delta_cap: float | None,
    count_cap: int | None,
    product_cap: float | None,
) -> list[tuple[int, int]]:
    """Greedy left-to-right maximal feasible ranges covering [l, r].

    Feasibility (cum_err, count, count*length below their caps) is
    monotone when the right end grows, so each maximal bucket is found
    by binary search.  Singletons are always feasible.
    """

    def ok(a: int, b: int) -> bool:
        cnt = b - a + 1
        if count_cap is not None and cnt > count_cap:
            return False
        if product_cap is not None and cnt * (pts[b] - pts[a]) > product_cap:
            return False
        if delta_cap is not None and _delta_of_range(pts, prefix, a, b) > delta_cap:
            return False
        return True

    out: list[tuple[int, int]] = []
    a = l
    while a <= r:
        if ok(a, r):
            out.append((a, r))
            break
        lo, hi = a, r  # ok(a, lo) holds, ok(a, hi) fails
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(a, mid):
                lo = mid
            else:
                hi = mid
        out.append((a, lo))
        a = lo + 1
    return out


def _count_cap(eps: float, n: int) -> int:
    """Bucket size cap floor(eps*n/16), degrading to singletons below 1."""
    return max(1, int(math.floor(eps * n / 16.0)))


def split_block(
    block: Block,
    level: int | None,
    eps: float,
    n: int,
    r_max: float,
    *,
    delta_constant: float = DEFAULT_DELTA_CONSTANT,
) -> list[Bucket]:
    """Chop one block into greedy maximal buckets under the level caps.

    Inner blocks of level i obey cum_err <= 2^i * eps^2 * n * r_max /
    delta_constant and count <= eps*n/16; far blocks (level None) obey
    the count cap alone.  Bucket indices refer to block.data.
    """
    pts = block.data
    prefix = np.concatenate(([0.0], np.cumsum(pts)))
    count_cap = _count_cap(eps, n)
    if level is None:
        delta_cap = None
    else:
        delta_cap = (2.0**level) * eps * eps * n * r_max / delta_constant
    ranges = _greedy_ranges(pts, prefix, block.l, block.r, delta_cap, count_cap, None)
    return [bucket_stats(pts, a, b) for a, b in ranges]


def _vanilla_bucket_ranges(
    pts: np.ndarray,
    lo: int,
    hi: int,
    eps: float,
    delta_constant: float,
) -> list[tuple[int, int]]:
    """Bucket ranges (global, inclusive) of the vanilla coreset on pts[lo:hi].

    Blocks double in distance from the slice median with scale r_bar =
    average absolute deviation; levels continue past the nominal top so
    every point is distance-proportionally capped.  Each level-i bucket
    obeys cum_err <= cap_i and count*length <= cap_i with cap_i =
    2^i * eps^2 * n_sub * r_bar / delta_constant.
    """
    n_sub = hi - lo
    if n_sub <= 0:
        return []
    if n_sub == 1:
        return [(lo, lo)]
    med = lo + (n_sub - 1) // 2
    center = pts[med]
    slice_ = pts[lo:hi]
    r_bar = float(np.mean(np.abs(slice_ - center)))
    if r_bar == 0.0:
        return [(lo, hi - 1)]
    dist = np.abs(slice_ - center)
    max_dist = float(dist.max())
    top = max(1, math.ceil(math.log2(max(max_dist, 2.0 * eps * r_bar) / (eps * r_bar))))
    labels = _classify_levels(dist, eps, r_bar, top)
    # Two monotone sides: left of the median (distance decreasing) and
    # the median onward (increasing); runs are contiguous inside each.
    side = (np.arange(lo, hi) >= med).astype(np.int64)
    combined = side * (top + 2) + labels
    prefix = np.concatenate(([0.0], np.cumsum(pts)))
    out: list[tuple[int, int]] = []
    for _, start, stop in _runs(combined):
        level = int(labels[start])
        cap = (2.0**level) * eps * eps * n_sub * r_bar / delta_constant
        out.extend(
            _greedy_ranges(pts, prefix, lo + start, lo + stop, cap, None, cap)
        )
    return out


def build_vanilla_1d(
    P_sorted,
    eps: float,
    *,
    delta_constant: float = DEFAULT_DELTA_CONSTANT,
) -> WeightedSet:
    """Coreset for the (non-robust) 1-d geometric median: (mean, count) buckets."""
    pts = _validated_sorted(P_sorted)
    if len(pts) < 1:
        raise ValueError("need at least one point")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    ranges = _vanilla_bucket_ranges(pts, 0, len(pts), eps, delta_constant)
    buckets = [bucket_stats(pts, a, b) for a, b in ranges]
    return _buckets_to_weighted_set(buckets)


def _validated_sorted(P_sorted) -> np.ndarray:
    pts = np.asarray(P_sorted, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite values")
    if len(pts) > 1 and np.any(np.diff(pts) < 0):
        raise ValueError("P must be sorted ascending")
    return pts


def _buckets_to_weighted_set(buckets: list[Bucket]) -> WeightedSet:
    means = np.array([b.mean for b in buckets], dtype=np.float64).reshape(-1, 1)
    counts = np.array([b.count for b in buckets], dtype=np.float64)
    return WeightedSet(means, counts)


def _window_at_center(pts: np.ndarray, center: float, keep: int) -> tuple[int, int]:
    """Inlier window of the n-keep farthest-out split at a fixed center.

    Excludes the farther end point by point; distance ties evict the
    larger index first, matching the canonical outlier tie-break.
    """
    lo, hi = 0, len(pts) - 1
    for _ in range(len(pts) - keep):
        if center - pts[lo] > pts[hi] - center:
            lo += 1
        else:
            hi -= 1
    return lo, hi


def boundary_split(buckets: list[Bucket], P_sorted, m: int) -> list[Bucket]:
    """Realign fringe buckets with the inlier windows of the two boundary centers.

    The windows of centers p_(m+1) and p_(n-m) (1-based) are computed by
    the same farthest-out eviction as the robust split; any bucket
    partially inside either window is split at the window edge.  At most
    four buckets gain a twin.
    """
    pts = _validated_sorted(P_sorted)
    n = len(pts)
    m = operator.index(m)
    if m == 0:
        return list(buckets)
    cuts: set[int] = set()
    for center_idx in (m, n - m - 1):
        a, b = _window_at_center(pts, float(pts[center_idx]), n - m)
        cuts.update((a, b + 1))
    out: list[Bucket] = []
    for bucket in buckets:
        inside = sorted(q for q in cuts if bucket.l < q <= bucket.r)
        if not inside:
            out.append(bucket)
            continue
        edges = [bucket.l, *inside, bucket.r + 1]
        for a, b in zip(edges, edges[1:]):
            out.append(bucket_stats(pts, a, b - 1))
    return out


@dataclass(frozen=True)
class Robust1dBuild:
    """Full build record: the coreset plus the buckets behind each row."""

    coreset: WeightedSet
    buckets: list[Bucket]
    partition: BlockPartition | None
    center: float | None
    r_max: float | None
    window: tuple[int, int] | None


def build_robust_1d_full(
    P_sorted,
    m: int,
    eps: float,
    *,
    allow_small_n: bool = False,
    delta_constant: float = DEFAULT_DELTA_CONSTANT,
) -> Robust1dBuild:
    """Robust 1-d coreset build returning buckets and anchors alongside."""
    pts = _validated_sorted(P_sorted)
    n = len(pts)
    m = operator.index(m)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if m < 0 or m >= max(n, 1):
        raise ValueError(f"need 0 <= m < |P|, got m={m}, |P|={n}")
    if n < 4 * m and not allow_small_n:
        raise AssumptionViolationError(
            f"robust 1-d builder needs n >= 4m (n={n}, m={m}); "
            "pass allow_small_n=True to build anyway without guarantees"
        )
    if m == 0:
        ranges = _vanilla_bucket_ranges(pts, 0, n, eps / 3.0, delta_constant)
        buckets = [bucket_stats(pts, a, b) for a, b in ranges]
        return Robust1dBuild(
            coreset=_buckets_to_weighted_set(buckets),
            buckets=buckets,
            partition=None,
            center=None,
            r_max=None,
            window=None,
        )
    solve = robust_median_1d(pts, m)
    left, right = solve.inlier_window
    center = float(solve.centers.centers[0, 0])
    r_max = float(max(center - pts[left], pts[right] - center))
    # Under the override the fringes may meet (n < 2m); shrink the right
    # fringe so the three zones stay a partition of the indices.
    right_base = max(n - m, m)
    middle_ranges = _vanilla_bucket_ranges(pts, m, n - m, eps / 3.0, delta_constant)
    part = partition_blocks(
        pts[:m], pts[right_base:], center - r_max, center + r_max, r_max, eps
    )
    fringe: list[Bucket] = []
    for block in part.all_blocks():
        base = 0 if block.side in ("L", "LR") else right_base
        for b in split_block(block, block.level, eps, n, r_max, delta_constant=delta_constant):
            fringe.append(bucket_stats(pts, base + b.l, base + b.r))
    fringe = boundary_split(fringe, pts, m)
    buckets = sorted(
        fringe + [bucket_stats(pts, a, b) for a, b in middle_ranges],
        key=lambda b: b.l,
    )
    return Robust1dBuild(
        coreset=_buckets_to_weighted_set(buckets),
        buckets=buckets,
        partition=part,
        center=center,
        r_max=r_max,
        window=(left, right),
    )


def build_robust_1d(
    P_sorted,
    m: int,
    eps: float,
    *,
    allow_small_n: bool = False,
    delta_constant: float = DEFAULT_DELTA_CONSTANT,
) -> WeightedSet:
    """Coreset for the robust 1-d geometric median with m outliers.

    Requires n >= 4m unless allow_small_n is set (the build then runs
    without its quality guarantee).  Output weights sum to n exactly.
    """
    return build_robust_1d_full(
        P_sorted,
        m,
        eps,
        allow_small_n=allow_small_n,
        delta_constant=delta_constant,
    ).coreset
