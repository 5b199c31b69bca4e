import math

import numpy as np
import pytest

from sofa import (
    DistanceMetric,
    MGSketch,
    MemoryStream,
    PlantedParams,
    SofaConfig,
    SparseBinaryVector,
    StaticBudgetError,
    WeightedCenter,
    generate_planted,
    quality,
    reservoir_sample,
    rs_reduction,
    sofa_postprocess,
    static_sofa,
    static_sofa_sweep,
)


def stream_of(id_lists, n):
    return MemoryStream([SparseBinaryVector(ids, n) for ids in id_lists], n)


METRIC = DistanceMetric(0.1)


class TestStaticSofa:
    def test_exact_recovery_on_noiseless_instance(self):
        params = PlantedParams(n=300, k=5, ell=20, r=20, p=1.0, q=0.0,
                               seed=17, disjoint_right=True)
        stream, truth = generate_planted(params)
        records = [vec for _, vec in stream.records()]
        clusters = static_sofa(records, 5, 0.5, METRIC, seed=2)
        assert quality([v.tolist() for v in truth.right_clusters], clusters) == 1.0

    def test_equals_postprocess_with_exact_sketches(self):
        # every record its own unit-weight center with a lossless summary:
        # the streaming postprocess and the static path must agree exactly
        params = PlantedParams(n=120, k=3, ell=15, r=10, p=0.8,
                               expected_noise_degree=2, seed=23)
        stream, _ = generate_planted(params)
        records = [vec for _, vec in stream.records()]
        centers = [
            WeightedCenter(vec, 1, MGSketch.from_indices(vec.indices, 120), i)
            for i, vec in enumerate(records)
        ]
        cfg = SofaConfig(k=3, sketch_capacity=120, c_max=len(records) + 3, seed=6)
        for theta in (0.3, 0.5, 0.7):
            assert sofa_postprocess(centers, cfg, theta) == static_sofa(
                records, 3, theta, cfg.metric, seed=6
            )

    def test_theta_above_every_relative_frequency(self):
        # one cluster of six disjoint singletons: every relative frequency
        # is 1/6, far below the threshold
        records = [SparseBinaryVector([i], 8) for i in range(6)]
        clusters = static_sofa(records, 1, 0.96, METRIC, seed=0)
        assert clusters == [[]]

    def test_budget_guard(self):
        records = [SparseBinaryVector([i], 10) for i in range(6)]
        with pytest.raises(StaticBudgetError):
            static_sofa(records, 2, 0.5, METRIC, max_points=5)

    def test_sweep_shares_clustering(self):
        params = PlantedParams(n=150, k=3, ell=20, r=12, p=0.9,
                               expected_noise_degree=2, seed=31)
        stream, _ = generate_planted(params)
        records = [vec for _, vec in stream.records()]
        sweep = dict(static_sofa_sweep(records, 3, [0.4, 0.6], METRIC, seed=4))
        assert sweep[0.4] == static_sofa(records, 3, 0.4, METRIC, seed=4)
        assert sweep[0.6] == static_sofa(records, 3, 0.6, METRIC, seed=4)
        for c4, c6 in zip(sweep[0.6], sweep[0.4]):
            assert set(c4) <= set(c6)


class TestReservoir:
    def test_sample_is_uniform(self):
        m, size, trials = 10, 4, 10_000
        rng = np.random.default_rng(5)
        counts = np.zeros(m)
        for _ in range(trials):
            for item in reservoir_sample(range(m), size, rng):
                counts[item] += 1
        expect = trials * size / m
        sigma = math.sqrt(trials * (size / m) * (1 - size / m))
        assert np.all(np.abs(counts - expect) <= 3 * sigma)

    def test_short_stream_returns_everything(self):
        rng = np.random.default_rng(0)
        assert reservoir_sample(range(3), 10, rng) == [0, 1, 2]

    def test_size_must_be_positive(self):
        with pytest.raises(ValueError):
            reservoir_sample(range(3), 0, np.random.default_rng(0))


class TestReduction:
    def test_degenerate_sampling_equals_static_on_full_graph(self):
        params = PlantedParams(n=100, k=3, ell=10, r=10, p=1.0, q=0.0, seed=41)
        stream, _ = generate_planted(params)
        full_records = [vec for _, vec in stream.records()]

        calls = []

        def algo(records):
            calls.append(records)
            return static_sofa(records, 3, 0.5, METRIC, seed=1)

        clusters = rs_reduction(stream, m_tilde=params.m + 5, n_tilde=100, static_algo=algo, seed=9)
        assert len(calls) == 1
        got = {frozenset(v.indices.tolist()) for v in calls[0]}
        want = {frozenset(v.indices.tolist()) for v in full_records}
        assert got == want
        assert clusters == static_sofa(full_records, 3, 0.5, METRIC, seed=1)

    def test_zero_distance_augmentation(self):
        # right vertex 2 has the same left-incidence as vertex 1 but loses
        # the degree tie to 1, so it drops out of the static instance; it
        # must re-attach to the cluster containing vertex 1 (distance 0)
        records = [[0, 3], [0, 3], [1, 2]]
        stream = stream_of(records, 5)

        def algo(recs):
            return static_sofa(recs, 2, 0.5, METRIC, seed=1)

        clusters = rs_reduction(stream, m_tilde=3, n_tilde=3, static_algo=algo, seed=0)
        assert sorted(map(sorted, clusters)) == [[0, 3], [1, 2]]

    def test_planted_quarter_sample_close_to_full_static(self):
        params = PlantedParams(n=800, k=6, ell=120, r=25, p=0.9,
                               expected_noise_degree=4, seed=55)
        stream, truth = generate_planted(params)
        records = [vec for _, vec in stream.records()]
        planted = [v.tolist() for v in truth.right_clusters]
        q_full = quality(planted, static_sofa(records, 6, 0.5, METRIC, seed=3))

        stream2, _ = generate_planted(params)

        def algo(recs):
            return static_sofa(recs, 6, 0.5, METRIC, seed=3)

        reduced = rs_reduction(stream2, m_tilde=params.m // 4, n_tilde=800,
                               static_algo=algo, seed=3)
        q_reduced = quality(planted, reduced)
        assert q_full - q_reduced <= 0.2

    def test_augmentation_only_touches_dropped_vertices(self):
        params = PlantedParams(n=200, k=3, ell=30, r=15, p=0.9,
                               expected_noise_degree=3, seed=61)
        stream, _ = generate_planted(params)
        n_tilde = 60

        def algo(recs):
            universe = set()
            for vec in recs:
                universe |= vec.to_set()
            assert len(universe) <= n_tilde
            return static_sofa(recs, 3, 0.5, METRIC, seed=1)

        clusters = rs_reduction(stream, m_tilde=40, n_tilde=n_tilde,
                                static_algo=algo, seed=7)
        assert len(clusters) == 3
