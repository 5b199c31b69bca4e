import itertools

import numpy as np
import pytest

from sofa import DistanceMetric, SYMMETRIC, SparseBinaryVector, kmedians_local_search
from sofa.vectors import asym_hamming


def vecs(id_lists, n):
    return [SparseBinaryVector(ids, n) for ids in id_lists]


def assignment_cost(points, medoids, metric, weights=None):
    """Exhaustive weighted cost of serving every point from its nearest medoid."""
    w = weights or [1.0] * len(points)
    total = 0.0
    for j, p in enumerate(points):
        total += w[j] * min(asym_hamming(points[m], p, metric) for m in medoids)
    return total


def brute_force_opt(points, k, metric, weights=None):
    best = np.inf
    for medoids in itertools.combinations(range(len(points)), k):
        best = min(best, assignment_cost(points, medoids, metric, weights))
    return best


class TestDegenerate:
    def test_k_equals_points(self):
        points = vecs([[0], [1], [2]], 5)
        res = kmedians_local_search(points, 3, SYMMETRIC, seed=1)
        assert res.cost == 0.0
        assert res.medoids == [0, 1, 2]
        assert res.labels.tolist() == [0, 1, 2]

    def test_k_exceeds_points_pads_empty_groups(self):
        points = vecs([[0], [1]], 5)
        res = kmedians_local_search(points, 4, SYMMETRIC, seed=1)
        groups = res.groups()
        assert groups == [[0], [1], [], []]

    def test_validation(self):
        with pytest.raises(ValueError):
            kmedians_local_search([], 1, SYMMETRIC)
        points = vecs([[0]], 3)
        with pytest.raises(ValueError):
            kmedians_local_search(points, 0, SYMMETRIC)
        with pytest.raises(ValueError):
            kmedians_local_search(points, 1, SYMMETRIC, weights=[0.0])


class TestOptimality:
    def test_k1_matches_exhaustive_minimizer(self):
        rng = np.random.default_rng(7)
        n = 30
        points = vecs(
            [sorted(rng.choice(n, size=rng.integers(1, 8), replace=False).tolist())
             for _ in range(40)],
            n,
        )
        metric = DistanceMetric(0.1)
        res = kmedians_local_search(points, 1, metric, seed=3)
        best = brute_force_opt(points, 1, metric)
        assert res.cost == pytest.approx(best, rel=1e-5)

    def test_k1_weighted(self):
        points = vecs([[0], [1], [2]], 5)
        weights = [10.0, 1.0, 1.0]
        res = kmedians_local_search(points, 1, SYMMETRIC, seed=0, weights=weights)
        assert res.medoids == [0]
        assert res.cost == pytest.approx(assignment_cost(points, [0], SYMMETRIC, weights))

    def test_duplicate_bundles_split_perfectly(self):
        points = vecs([[0, 1]] * 4 + [[8, 9]] * 4, 10)
        res = kmedians_local_search(points, 2, SYMMETRIC, seed=5)
        assert res.cost == 0.0
        labels = res.labels.tolist()
        assert len(set(labels[:4])) == 1 and len(set(labels[4:])) == 1
        assert labels[0] != labels[4]

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_five_approximation_small_instances(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = 12
        npts = int(rng.integers(6, 13))
        k = int(rng.integers(1, 4))
        points = vecs(
            [sorted(rng.choice(n, size=rng.integers(1, 6), replace=False).tolist())
             for _ in range(npts)],
            n,
        )
        metric = DistanceMetric(float(rng.choice([0.1, 0.5, 1.0])))
        opt = brute_force_opt(points, min(k, npts), metric)
        res = kmedians_local_search(points, k, metric, seed=seed)
        # single-swap local optimum is a 5-approximation; allow the 0.1%
        # stopping slack on top
        assert res.cost <= 5.0 * opt * 1.01 + 1e-9


class TestDeterminism:
    def test_same_seed_same_result(self):
        rng = np.random.default_rng(2)
        points = vecs(
            [sorted(rng.choice(40, size=5, replace=False).tolist()) for _ in range(60)],
            40,
        )
        r1 = kmedians_local_search(points, 4, DistanceMetric(0.1), seed=9)
        r2 = kmedians_local_search(points, 4, DistanceMetric(0.1), seed=9)
        assert r1.medoids == r2.medoids
        assert np.array_equal(r1.labels, r2.labels)
        assert r1.cost == r2.cost

    def test_assignment_ties_to_lowest_medoid(self):
        # two identical medoid candidates; every point must label to the
        # lower-indexed one
        points = vecs([[0], [0], [5], [5]], 8)
        res = kmedians_local_search(points, 2, SYMMETRIC, seed=1)
        for j, lab in enumerate(res.labels.tolist()):
            dists = [
                asym_hamming(points[m], points[j], SYMMETRIC) for m in res.medoids
            ]
            assert dists[lab] == min(dists)
            assert lab == int(np.argmin(dists))

    def test_reported_cost_matches_assignment(self):
        rng = np.random.default_rng(4)
        points = vecs(
            [sorted(rng.choice(25, size=4, replace=False).tolist()) for _ in range(30)],
            25,
        )
        weights = rng.integers(1, 5, size=30).astype(float).tolist()
        metric = DistanceMetric(0.3)
        res = kmedians_local_search(points, 3, metric, seed=8, weights=weights)
        assert res.cost == pytest.approx(
            assignment_cost(points, res.medoids, metric, weights), rel=1e-5
        )
