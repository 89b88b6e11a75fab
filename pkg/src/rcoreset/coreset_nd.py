"""Robust coresets in general dimension via two-part sampling.

The builder splits the input at an approximate center set into the m
farthest points and the rest, draws a uniform sample (without
replacement) of the far part with equal weights summing to m, and
compresses the near part by sensitivity sampling (with replacement,
duplicate draws aggregated, total weight normalized to the part size).
A diagnostic reports whether the structural assumptions behind the
quality guarantee hold; builds are never blocked by it.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

from rcoreset.core import CenterSet, WeightedSet, as_points, outlier_split

__all__ = [
    "AssumptionReport",
    "NdBuild",
    "NdCoresetConfig",
    "build_inlier_coreset",
    "build_robust_kz",
    "build_robust_kz_full",
    "build_robust_nd",
    "check_assumptions",
    "evaluate_conditions",
    "sample_outlier_coreset",
    "split_sample_sizes",
]


def _log_factor(eps: float) -> int:
    return math.ceil(math.log2(1.0 / eps) + 1.0)


def split_sample_sizes(target_size: int, m: int) -> tuple[int, int]:
    """Split a total row budget between the outlier and inlier samples.

    The outlier sample only has to approximate ball ranges, which takes
    an order fewer points than the sensitivity sample needs for the
    inlier mass, so it gets a tenth of the budget (never more than m,
    and at least one row each when m > 0).
    """
    target_size = operator.index(target_size)
    m = operator.index(m)
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if m == 0:
        if target_size < 1:
            raise ValueError(f"target_size must be >= 1, got {target_size}")
        return 0, target_size
    if target_size < 2:
        raise ValueError(f"target_size must be >= 2 when m > 0, got {target_size}")
    outlier = min(m, target_size - 1, max(1, math.ceil(target_size / 10)))
    return outlier, target_size - outlier


@dataclass(frozen=True)
class NdCoresetConfig:
    """Sampling budgets for the general-dimension robust builder.

    Explicit sizes win; otherwise the defaults scale as
    c0 * eps^-2 * min(eps^-2, d) * log-factor for the far sample and the
    same expression with eps^-2 -> eps^-2z and an extra k^2 for the near
    sample.
    """

    eps: float
    outlier_sample_size: int | None = None
    inlier_sample_size: int | None = None
    seed: int = 0
    c0: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        for name in ("outlier_sample_size", "inlier_sample_size"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")
        if self.c0 <= 0:
            raise ValueError(f"c0 must be positive, got {self.c0}")

    def resolved_outlier_size(self, d: int) -> int:
        if self.outlier_sample_size is not None:
            return self.outlier_sample_size
        inv2 = self.eps**-2.0
        return max(1, math.ceil(self.c0 * inv2 * min(inv2, d) * _log_factor(self.eps)))

    def resolved_inlier_size(self, d: int, k: int, z: int) -> int:
        if self.inlier_sample_size is not None:
            return self.inlier_sample_size
        inv2 = self.eps**-2.0
        scale = self.eps ** (-2.0 * z)
        return max(
            1,
            math.ceil(self.c0 * scale * min(inv2, d) * _log_factor(self.eps) * k * k),
        )


@dataclass(frozen=True)
class AssumptionReport:
    """Structural diagnostics at an approximate center set.

    cond1: every cluster keeps at least 4m near points.  cond2: the
    max-to-mean inlier radius ratio satisfies (r_max/r_bar)^z <= 4k.
    separation_ok is the alternative pairwise-center condition
    dist(c_i, c_j)^z >= m * r_max^z / min(|P_i|, |P_j|); it is reported
    but never gates a build.
    """

    cluster_sizes: tuple[int, ...]
    r_max: float
    r_bar: float
    cond1: bool
    cond2: bool
    separation_ok: bool


def evaluate_conditions(
    min_cluster_size: int, r_max: float, r_bar: float, m: int, k: int, z: int
) -> tuple[bool, bool]:
    """The two assumption thresholds from raw summary numbers."""
    cond1 = min_cluster_size >= 4 * m
    if r_bar == 0.0:
        cond2 = r_max == 0.0
    else:
        cond2 = (r_max / r_bar) ** z <= 4.0 * k
    return cond1, cond2


def _as_center_set(centers, z: int) -> CenterSet:
    if isinstance(centers, CenterSet):
        if centers.z != z:
            raise ValueError(f"center set has z={centers.z}, expected z={z}")
        return centers
    return CenterSet(as_points(centers), z=z)


def _lex_rows(points: np.ndarray) -> np.ndarray:
    """Row order sorting points lexicographically by coordinates."""
    return np.lexsort(points.T[::-1])


def _min_dist_pow(points: np.ndarray, C: CenterSet) -> np.ndarray:
    diffs = points[:, None, :] - C.centers[None, :, :]
    d2 = np.einsum("nkd,nkd->nk", diffs, diffs)
    dmin = np.sqrt(np.min(d2, axis=1))
    return dmin if C.z == 1 else dmin**2


def sample_outlier_coreset(L_star, size: int, seed) -> WeightedSet:
    """Uniform sample without replacement of the far part, reweighted to it.

    Keeps min(size, |L_star|) points, each at weight |L_star|/sample
    size, so the total weight equals |L_star| (up to roundoff when the
    weight is not representable).
    """
    points = as_points(L_star)
    m = len(points)
    if m < 1:
        raise ValueError("outlier part must be nonempty")
    size = operator.index(size)
    if size < 1:
        raise ValueError(f"sample size must be >= 1, got {size}")
    rng = np.random.default_rng(seed)
    s = min(size, m)
    idx = np.sort(rng.choice(m, size=s, replace=False))
    return WeightedSet(points[idx], np.full(s, m / s))


def build_inlier_coreset(P_I, C_star, z: int, size: int, seed) -> WeightedSet:
    """Sensitivity sample of the near part against its center set.

    Draw probabilities blend a uniform term with each point's share of
    the total z-power cost; draws are with replacement, duplicates
    aggregate into one weighted row, and the weights are scaled so the
    total equals |P_I| exactly up to roundoff.
    """
    points = as_points(P_I)
    n_i = len(points)
    if n_i < 1:
        raise ValueError("inlier part must be nonempty")
    size = operator.index(size)
    if size < 1:
        raise ValueError(f"sample size must be >= 1, got {size}")
    C = _as_center_set(C_star, z)
    dpow = _min_dist_pow(points, C)
    total = float(np.sum(dpow))
    if total > 0.0:
        probs = 0.5 * (1.0 / n_i + dpow / total)
    else:
        probs = np.full(n_i, 1.0 / n_i)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(n_i, size=size, replace=True, p=probs)
    uniq, counts = np.unique(draws, return_counts=True)
    weights = counts / (size * probs[uniq])
    weights *= n_i / weights.sum()
    return WeightedSet(points[uniq], weights)


@dataclass(frozen=True)
class NdBuild:
    """Build record: the combined coreset plus its two parts and the split."""

    coreset: WeightedSet
    outlier_rows: WeightedSet | None
    inlier_rows: WeightedSet
    L_star: np.ndarray
    P_I_star: np.ndarray


def build_robust_kz_full(P, m: int, k: int, z: int, cfg: NdCoresetConfig, C_star) -> NdBuild:
    """Robust (k, z)-clustering coreset, returning the full build record.

    The far/near split happens at C_star with the canonical tie-break;
    both parts are put in coordinate-lexicographic order before
    sampling, so the output is invariant to input ordering whenever the
    split itself is (distinct distances).  Outlier rows come first in
    the combined coreset.
    """
    points = as_points(P)
    C = _as_center_set(C_star, z)
    if len(C) != k:
        raise ValueError(f"expected {k} centers, got {len(C)}")
    m = operator.index(m)
    if not 0 <= m < len(points):
        raise ValueError(f"need 0 <= m < |P|, got m={m}, |P|={len(points)}")
    inl_idx, out_idx = outlier_split(points, C, m)
    L_star = points[out_idx]
    P_I = points[inl_idx]
    L_star = L_star[_lex_rows(L_star)] if m > 0 else L_star
    P_I = P_I[_lex_rows(P_I)]
    rng = np.random.default_rng(cfg.seed)
    if m > 0:
        S_O = sample_outlier_coreset(L_star, cfg.resolved_outlier_size(points.shape[1]), rng)
    else:
        S_O = None
    S_I = build_inlier_coreset(
        P_I, C, z, cfg.resolved_inlier_size(points.shape[1], k, z), rng
    )
    if S_O is None:
        combined = S_I
    else:
        combined = WeightedSet(
            np.concatenate([S_O.points, S_I.points]),
            np.concatenate([S_O.weights, S_I.weights]),
        )
    return NdBuild(
        coreset=combined,
        outlier_rows=S_O,
        inlier_rows=S_I,
        L_star=L_star,
        P_I_star=P_I,
    )


def build_robust_kz(P, m: int, k: int, z: int, cfg: NdCoresetConfig, C_star) -> WeightedSet:
    """Robust (k, z)-clustering coreset: far sample plus near sample."""
    return build_robust_kz_full(P, m, k, z, cfg, C_star).coreset


def build_robust_nd(P, m: int, cfg: NdCoresetConfig, c_star) -> WeightedSet:
    """Robust geometric-median coreset (the k=1, z=1 specialization)."""
    return build_robust_kz(P, m, 1, 1, cfg, c_star)


def check_assumptions(P, C_star, m: int, k: int, z: int) -> AssumptionReport:
    """Diagnostic for the structural assumptions at an approximate solution.

    Splits P at C_star into m far points and the near rest, assigns near
    points to their closest center (ties to the lower center index), and
    evaluates both threshold conditions plus the alternative pairwise
    separation condition.  Purely informational.
    """
    points = as_points(P)
    C = _as_center_set(C_star, z)
    if len(C) != k:
        raise ValueError(f"expected {k} centers, got {len(C)}")
    m = operator.index(m)
    if not 0 <= m < len(points):
        raise ValueError(f"need 0 <= m < |P|, got m={m}, |P|={len(points)}")
    inl_idx, _ = outlier_split(points, C, m)
    P_I = points[inl_idx]
    diffs = P_I[:, None, :] - C.centers[None, :, :]
    d2 = np.einsum("nkd,nkd->nk", diffs, diffs)
    nearest = np.argmin(d2, axis=1)
    sizes = tuple(int(np.sum(nearest == i)) for i in range(k))
    dmin = np.sqrt(d2[np.arange(len(P_I)), nearest])
    r_max = float(np.max(dmin)) if len(P_I) else 0.0
    r_bar = float(np.mean(dmin**z)) ** (1.0 / z) if len(P_I) else 0.0
    cond1, cond2 = evaluate_conditions(min(sizes), r_max, r_bar, m, k, z)
    separation_ok = True
    for i in range(k):
        for j in range(i + 1, k):
            pair_min = min(sizes[i], sizes[j])
            gap = float(np.linalg.norm(C.centers[i] - C.centers[j])) ** z
            if pair_min == 0:
                if m * r_max**z > 0.0:
                    separation_ok = False
            elif gap < m * r_max**z / pair_min:
                separation_ok = False
    return AssumptionReport(
        cluster_sizes=sizes,
        r_max=r_max,
        r_bar=r_bar,
        cond1=cond1,
        cond2=cond2,
        separation_ok=separation_ok,
    )
