import numpy as np
import pytest

from sofa import (
    MemoryStream,
    SparseBinaryVector,
    membership_from_assignment,
    quality,
    reconstruction_stats,
)
from sofa.metrics import metrics_lines, metrics_tsv


def stream_of(id_lists, n):
    return MemoryStream([SparseBinaryVector(ids, n) for ids in id_lists], n)


class TestQuality:
    def test_exact_recovery(self):
        ground = [[1, 2], [3]]
        assert quality(ground, [[3], [1, 2]]) == 1.0

    def test_disjoint_nonempty(self):
        assert quality([[1, 2]], [[3, 4]]) == 0.0

    def test_half_overlap(self):
        assert quality([[1, 2]], [[1]]) == 0.5

    def test_empty_conventions(self):
        assert quality([[]], [[]]) == 1.0
        assert quality([[]], [[1]]) == 0.0
        assert quality([[1]], []) == 0.0

    def test_ground_must_be_nonempty(self):
        with pytest.raises(ValueError):
            quality([], [[1]])


class TestReconstruction:
    def test_perfect_reconstruction(self):
        records = [[0, 1], [2]]
        clusters = [[0, 1], [2]]
        membership = {0: (0,), 1: (1,)}
        gain, recall = reconstruction_stats(stream_of(records, 4), membership, clusters)
        assert gain == 1.0 and recall == 1.0

    def test_all_empty_memberships(self):
        records = [[0, 1], [2]]
        membership = {0: (), 1: ()}
        gain, recall = reconstruction_stats(stream_of(records, 4), membership, [[0]])
        assert gain == 0.0 and recall == 0.0

    def test_one_missed_one_spurious(self):
        # |E| = 4; row 0 reconstructed with a spurious 3 and missing 1
        records = [[0, 1], [2, 3]]
        clusters = [[0, 3], [2, 3]]
        membership = {0: (0,), 1: (1,)}
        gain, recall = reconstruction_stats(stream_of(records, 5), membership, clusters)
        assert gain == pytest.approx(1 - 2 / 4)
        assert recall == pytest.approx(3 / 4)

    def test_edgeless_graph_is_an_error(self):
        with pytest.raises(ValueError):
            reconstruction_stats(stream_of([[]], 3), {0: ()}, [[0]])

    def test_gain_can_be_negative(self):
        records = [[0]]
        clusters = [[0, 1, 2, 3]]
        membership = {0: (0,)}
        gain, recall = reconstruction_stats(stream_of(records, 5), membership, clusters)
        assert gain == pytest.approx(1 - 3 / 1)
        assert recall == 1.0

    def test_matches_dense_boolean_product(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            m, n = rng.integers(1, 21), int(rng.integers(1, 21))
            k = int(rng.integers(1, 5))
            dense_b = rng.random((m, n)) < 0.3
            if not dense_b.any():
                dense_b[0, 0] = True
            right = rng.random((k, n)) < 0.25
            left = rng.random((m, k)) < 0.4
            reconstructed = (left @ right) > 0  # boolean matrix product
            gain_dense = 1 - np.sum(dense_b != reconstructed) / np.sum(dense_b)
            recall_dense = np.sum(dense_b & reconstructed) / np.sum(dense_b)

            records = [np.flatnonzero(dense_b[i]).tolist() for i in range(m)]
            clusters = [np.flatnonzero(right[i]).tolist() for i in range(k)]
            membership = {
                i: tuple(np.flatnonzero(left[i]).tolist()) for i in range(m)
            }
            gain, recall = reconstruction_stats(
                stream_of(records, n), membership, clusters
            )
            assert gain == gain_dense
            assert recall == recall_dense

    def test_membership_from_assignment(self):
        assert membership_from_assignment({0: 2, 1: None}) == {0: (2,), 1: ()}


class TestFormatting:
    def test_lines(self):
        text = metrics_lines({"gain": 0.5, "recall": 1 / 3, "phases": 4})
        assert text.splitlines() == ["gain=0.5", "recall=0.3333333333", "phases=4"]

    def test_tsv(self):
        text = metrics_tsv({"gain": 0.5, "recall": 0.25})
        assert text == "gain\trecall\n0.5\t0.25\n"
