import pytest

from sofa import (
    ClusteringArtifact,
    MemoryStream,
    PassBudgetError,
    SparseBinaryVector,
    StreamFormatError,
    open_stream,
    read_artifact,
    write_artifact,
)


def collect(stream):
    return [(uid, vec.indices.tolist()) for uid, vec in stream.records()]


class TestAdjacency:
    def test_basic_records(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("0 3 5\n2 4\n")
        stream = open_stream(path, "adjacency", n=6)
        assert collect(stream) == [(0, [0, 3, 5]), (1, [2, 4])]
        assert stream.m == 2

    def test_header_supplies_n_and_m(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("%sofa n=6 m=2\n0 3 5\n2 4\n")
        stream = open_stream(path, "adjacency")
        assert stream.n == 6 and stream.m == 2
        assert collect(stream) == [(0, [0, 3, 5]), (1, [2, 4])]

    def test_blank_line_is_degree_zero(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("1\n\n2\n")
        stream = open_stream(path, "adjacency", n=3)
        assert collect(stream) == [(0, [1]), (1, []), (2, [2])]

    def test_missing_n_fails(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("0 1\n")
        with pytest.raises(StreamFormatError):
            open_stream(path, "adjacency")

    def test_conflicting_n_fails(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("%sofa n=6\n0 1\n")
        with pytest.raises(StreamFormatError):
            open_stream(path, "adjacency", n=7)

    def test_malformed_token(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("0 x\n")
        with pytest.raises(StreamFormatError):
            collect(open_stream(path, "adjacency", n=6))

    def test_index_out_of_universe(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("0 9\n")
        with pytest.raises(StreamFormatError):
            collect(open_stream(path, "adjacency", n=6))

    def test_unsorted_line_is_normalized(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("5 0 3\n")
        assert collect(open_stream(path, "adjacency", n=6)) == [(0, [0, 3, 5])]

    def test_duplicate_token_is_malformed(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("1 1\n")
        with pytest.raises(StreamFormatError):
            collect(open_stream(path, "adjacency", n=6))

    def test_header_m_must_match_body(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("%sofa n=6 m=3\n0 1\n2\n")
        with pytest.raises(StreamFormatError, match="record count"):
            collect(open_stream(path, "adjacency"))


class TestEdgeList:
    def test_grouped_records(self, tmp_path):
        path = tmp_path / "g.el"
        path.write_text("0 1\n0 2\n1 2\n")
        stream = open_stream(path, "edge-list", n=3)
        assert collect(stream) == [(0, [1, 2]), (1, [2])]

    def test_ungrouped_is_fatal(self, tmp_path):
        path = tmp_path / "g.el"
        path.write_text("0 1\n1 2\n0 3\n")
        with pytest.raises(StreamFormatError, match="contiguous"):
            collect(open_stream(path, "edge-list", n=6))

    def test_bad_arity(self, tmp_path):
        path = tmp_path / "g.el"
        path.write_text("0 1 2\n")
        with pytest.raises(StreamFormatError):
            collect(open_stream(path, "edge-list", n=6))


class TestPassBudget:
    def test_two_passes_identical_third_fails(self, tmp_path):
        path = tmp_path / "g.adj"
        path.write_text("%sofa n=6\n0 3 5\n2 4\n\n")
        stream = open_stream(path, "adjacency")
        first = collect(stream)
        second = collect(stream)
        assert first == second
        with pytest.raises(PassBudgetError):
            stream.records()

    def test_memory_stream_budget(self):
        stream = MemoryStream([SparseBinaryVector([1], 4)], 4)
        collect(stream)
        collect(stream)
        with pytest.raises(PassBudgetError):
            stream.records()

    def test_memory_stream_rejects_foreign_universe(self):
        with pytest.raises(StreamFormatError):
            MemoryStream([SparseBinaryVector([1], 5)], 4)


def sample_artifact(mode="bicluster"):
    left = {0: (1,), 1: (), 2: (0,)}
    if mode == "bmf":
        left = {0: (0, 1), 1: (), 2: (0,)}
    return ClusteringArtifact(
        mode=mode,
        right_clusters=[[5, 1, 3], [], [2]],
        params={"theta": 0.5, "alpha": 0.1, "seed": 3, "note": "x"},
        left=left,
    )


class TestArtifact:
    def test_validation(self):
        with pytest.raises(ValueError):
            ClusteringArtifact(mode="nope", right_clusters=[], left={})
        with pytest.raises(ValueError):
            ClusteringArtifact(
                mode="bicluster", right_clusters=[[1]], left={0: (1,)}
            )
        with pytest.raises(ValueError):
            ClusteringArtifact(
                mode="bicluster", right_clusters=[[1], [2]], left={0: (0, 1)}
            )

    def test_clusters_normalized_sorted(self):
        art = sample_artifact()
        assert art.right_clusters[0] == [1, 3, 5]

    @pytest.mark.parametrize("fmt", ["tsv", "structured-text"])
    @pytest.mark.parametrize("mode", ["bicluster", "bmf"])
    def test_round_trip(self, tmp_path, fmt, mode):
        art = sample_artifact(mode)
        path = tmp_path / "a.out"
        write_artifact(art, path, fmt)
        back = read_artifact(path)
        assert back == art

    def test_empty_clustering_header_only(self, tmp_path):
        art = ClusteringArtifact(mode="bmf", right_clusters=[], left={})
        path = tmp_path / "a.tsv"
        write_artifact(art, path, "tsv")
        text = path.read_text()
        assert all(line.startswith("#") for line in text.splitlines())
        assert read_artifact(path) == art

    def test_deterministic_bytes(self, tmp_path):
        p1, p2 = tmp_path / "a1", tmp_path / "a2"
        write_artifact(sample_artifact(), p1, "tsv")
        write_artifact(sample_artifact(), p2, "tsv")
        assert p1.read_bytes() == p2.read_bytes()

    def test_cluster_ids_ascending_in_file(self, tmp_path):
        path = tmp_path / "a.tsv"
        write_artifact(sample_artifact(), path, "tsv")
        rows = [l.split("\t")[1] for l in path.read_text().splitlines() if l.startswith("R")]
        assert rows == sorted(rows, key=int)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            write_artifact(sample_artifact(), tmp_path / "a", "yaml")
