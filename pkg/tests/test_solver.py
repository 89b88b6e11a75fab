"""Tests for the 1-d robust median, seeding, and outlier-aware Lloyd."""

from __future__ import annotations

import numpy as np
import pytest

from rcoreset import CenterSet, robust_cost
from rcoreset.solver import kmeanspp_seed, lloyd_with_outliers, robust_median_1d

from oracles import brute_robust_median_1d


class TestRobustMedian1d:
    def test_drops_far_outlier(self):
        res = robust_median_1d([0.0, 1.0, 2.0, 100.0], m=1)
        assert res.inlier_window == (0, 2)
        assert res.centers.centers[0, 0] == 1.0
        assert res.cost == 2.0

    def test_m_zero_is_plain_median(self):
        res = robust_median_1d([0.0, 1.0, 2.0], m=0)
        assert res.centers.centers[0, 0] == 1.0
        assert res.cost == 2.0

    def test_window_tie_prefers_smallest_left_index(self):
        res = robust_median_1d([1.0, 2.0, 3.0, 4.0], m=2)
        assert res.cost == 1.0
        assert res.inlier_window == (0, 1)
        assert res.centers.centers[0, 0] == 1.0  # lower median of {1, 2}

    def test_m_at_least_n_rejected(self):
        with pytest.raises(ValueError, match="m < "):
            robust_median_1d([0.0, 1.0], m=2)

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError, match="sorted"):
            robust_median_1d([1.0, 0.0], m=0)

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(42)
        for trial in range(120):
            n = int(rng.integers(2, 65))
            m = int(rng.integers(0, n))
            pts = np.sort(rng.integers(-50, 51, size=n).astype(float))
            res = robust_median_1d(pts, m)
            cost, left, center = brute_robust_median_1d(pts, m)
            assert res.cost == cost, f"trial {trial}: cost {res.cost} vs brute {cost}"
            assert res.inlier_window[0] == left, (
                f"trial {trial}: window start {res.inlier_window[0]} vs brute {left}"
            )
            assert res.centers.centers[0, 0] == center

    def test_cost_matches_robust_cost_recomputed(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(2, 200))
            m = int(rng.integers(0, n))
            pts = np.sort(rng.normal(size=n) * 10)
            res = robust_median_1d(pts, m)
            recomputed = robust_cost(pts, res.centers, m)
            assert res.cost == pytest.approx(recomputed, rel=1e-7)


class TestKmeansppSeed:
    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(0)
        P = rng.normal(size=(40, 3))
        a = kmeanspp_seed(P, k=4, z=2, seed=123)
        b = kmeanspp_seed(P, k=4, z=2, seed=123)
        assert np.array_equal(a.centers, b.centers)

    def test_k_equals_n_selects_everything(self):
        P = np.array([[0.0], [1.0], [1.0], [5.0]])
        got = kmeanspp_seed(P, k=4, z=1, seed=7)
        assert sorted(got.centers[:, 0].tolist()) == [0.0, 1.0, 1.0, 5.0]

    def test_two_points_both_selected(self):
        for seed in range(10):
            got = kmeanspp_seed([0.0, 100.0], k=2, z=1, seed=seed)
            assert sorted(got.centers[:, 0].tolist()) == [0.0, 100.0]

    def test_k_above_n_rejected(self):
        with pytest.raises(ValueError, match="k <= "):
            kmeanspp_seed([0.0, 1.0], k=3, z=1, seed=0)


class TestLloydWithOutliers:
    def test_fixed_point_with_given_init(self):
        res = lloyd_with_outliers(
            [0.0, 1.0, 100.0], k=1, m=1, z=2, max_iters=10, seed=0,
            init=CenterSet([[0.5]], z=2),
        )
        assert res.centers.centers[0, 0] == 0.5
        assert res.cost == 0.5

    def test_m_zero_k1_z2_converges_to_mean(self):
        rng = np.random.default_rng(5)
        P = rng.normal(size=(60, 2))
        res = lloyd_with_outliers(P, k=1, m=0, z=2, max_iters=30, seed=1)
        assert np.allclose(res.centers.centers[0], P.mean(axis=0))

    def test_cost_matches_recomputation(self):
        rng = np.random.default_rng(11)
        P = rng.normal(size=(80, 3))
        P[:8] += 40.0
        res = lloyd_with_outliers(P, k=2, m=8, z=1, max_iters=25, seed=2)
        assert res.cost == pytest.approx(robust_cost(P, res.centers, 8), rel=1e-7)

    def test_cost_sequence_monotone(self):
        rng = np.random.default_rng(99)
        for trial in range(100):
            n = int(rng.integers(8, 40))
            d = int(rng.integers(1, 4))
            k = int(rng.integers(1, 4))
            z = int(rng.integers(1, 3))
            m = int(rng.integers(0, n // 4 + 1))
            P = rng.normal(size=(n, d)) * 5
            seed = int(rng.integers(0, 2**31))
            costs = [
                lloyd_with_outliers(P, k, m, z, max_iters=t, seed=seed).cost
                for t in (1, 2, 3, 5)
            ]
            for a, b in zip(costs, costs[1:]):
                assert b <= a + 1e-9 * max(a, 1.0), (
                    f"trial {trial}: cost increased along iterations: {costs}"
                )

    def test_final_cost_below_seeding_cost(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            P = rng.normal(size=(50, 2)) * 3
            seeded = kmeanspp_seed(P, k=3, z=2, seed=17)
            initial = robust_cost(P, seeded, 4)
            res = lloyd_with_outliers(P, k=3, m=4, z=2, max_iters=20, seed=17)
            assert res.cost <= initial + 1e-9 * max(initial, 1.0)

    def test_empty_cluster_reseeded(self):
        P = np.array([[0.0], [0.0], [0.0], [100.0]])
        res = lloyd_with_outliers(
            P, k=2, m=0, z=2, max_iters=10, seed=0,
            init=CenterSet([[0.0], [300.0]], z=2),
        )
        assert res.cost == pytest.approx(0.0, abs=1e-12)

    def test_weighted_run_matches_replicated_points(self):
        # Integer weights should behave like repeating the points.
        P = np.array([[0.0], [2.0], [10.0]])
        w = np.array([3.0, 1.0, 2.0])
        replicated = np.repeat(P, [3, 1, 2], axis=0)
        a = lloyd_with_outliers(
            P, k=1, m=1, z=2, max_iters=15, seed=4, weights=w,
            init=CenterSet([[1.0]], z=2),
        )
        b = lloyd_with_outliers(
            replicated, k=1, m=1, z=2, max_iters=15, seed=4,
            init=CenterSet([[1.0]], z=2),
        )
        assert a.cost == pytest.approx(b.cost, rel=1e-12)
        assert np.allclose(a.centers.centers, b.centers.centers)
