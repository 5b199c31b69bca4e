"""Planted-model generator for random bipartite graphs.

Left vertices come in k blocks of size ell; each block owns a right cluster
of r vertices sampled uniformly from the universe (independently per block,
so clusters may overlap unless ``disjoint_right`` is set).  An edge from a
block-i vertex to a right vertex appears with probability p inside cluster i
and q outside.  ``q`` may be given directly or derived from an expected
noise degree as q = noise / (n - r).

Stream records are numbered by stream position (the order is a seeded
shuffle by default), and the ground truth is expressed in those ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from sofa.stream_io import MemoryStream, StreamFormatError
from sofa.vectors import SparseBinaryVector

__all__ = [
    "PlantedParams",
    "GroundTruth",
    "generate_planted",
    "write_planted",
    "write_ground_truth",
    "read_ground_truth",
]

_ORDERS = ("shuffled", "by-cluster")
DEFAULT_NOISE_DEGREE = 20.0


@dataclass(frozen=True)
class PlantedParams:
    n: int = 8000
    k: int = 50
    ell: int = 200
    r: int = 30
    p: float = 0.7
    q: float | None = None
    expected_noise_degree: float | None = None
    seed: int = 0
    disjoint_right: bool = False
    order: str = "shuffled"

    def __post_init__(self):
        if min(self.n, self.k, self.ell, self.r) < 1:
            raise ValueError("n, k, ell and r must be positive")
        if self.r > self.n:
            raise ValueError("r must not exceed n")
        if self.q is not None and self.expected_noise_degree is not None:
            raise ValueError("give q or expected_noise_degree, not both")
        q = self.resolved_q
        if not (0.0 <= q < self.p <= 1.0):
            raise ValueError(f"need 0 <= q < p <= 1, got q={q}, p={self.p}")
        if self.disjoint_right and self.k * self.r > self.n:
            raise ValueError("disjoint right clusters need k * r <= n")
        if self.order not in _ORDERS:
            raise ValueError(f"order must be one of {_ORDERS}")

    @property
    def m(self) -> int:
        return self.k * self.ell

    @property
    def resolved_q(self) -> float:
        if self.q is not None:
            return self.q
        noise = (
            self.expected_noise_degree
            if self.expected_noise_degree is not None
            else DEFAULT_NOISE_DEGREE
        )
        return noise / (self.n - self.r) if self.n > self.r else 0.0


@dataclass
class GroundTruth:
    """Cluster id per left stream position, plus the planted right clusters."""

    left_labels: np.ndarray
    right_clusters: list[np.ndarray]

    def left_blocks(self) -> list[list[int]]:
        k = len(self.right_clusters)
        blocks: list[list[int]] = [[] for _ in range(k)]
        for uid, lab in enumerate(self.left_labels.tolist()):
            blocks[lab].append(uid)
        return blocks


def _sample_clusters(params: PlantedParams, rng: np.random.Generator) -> list[np.ndarray]:
    if params.disjoint_right:
        pool = rng.permutation(params.n)[: params.k * params.r]
        return [np.sort(pool[i * params.r : (i + 1) * params.r]) for i in range(params.k)]
    return [
        np.sort(rng.choice(params.n, size=params.r, replace=False))
        for _ in range(params.k)
    ]


def _sample_noise(
    rng: np.random.Generator, n: int, exclude: set[int], count: int
) -> list[int]:
    # rejection sampling; counts are tiny relative to n in the sparse regime
    picked: set[int] = set()
    while len(picked) < count:
        need = count - len(picked)
        for v in rng.integers(0, n, size=2 * need + 8).tolist():
            if v not in exclude and v not in picked:
                picked.add(v)
                if len(picked) == count:
                    break
    return sorted(picked)


def _planted_records(
    params: PlantedParams,
) -> tuple[Iterator[tuple[int, np.ndarray]], GroundTruth]:
    rng = np.random.default_rng(params.seed)
    clusters = _sample_clusters(params, rng)
    cluster_sets = [set(c.tolist()) for c in clusters]
    q = params.resolved_q
    block = np.repeat(np.arange(params.k), params.ell)
    if params.order == "shuffled":
        stream_labels = block[rng.permutation(params.m)]
    else:
        stream_labels = block
    truth = GroundTruth(left_labels=stream_labels.copy(), right_clusters=clusters)

    def gen() -> Iterator[tuple[int, np.ndarray]]:
        comp = params.n - params.r
        for uid, lab in enumerate(stream_labels.tolist()):
            members = clusters[lab]
            signal = members[rng.random(params.r) < params.p]
            noise_count = int(rng.binomial(comp, q)) if q > 0 else 0
            if noise_count:
                noise = _sample_noise(rng, params.n, cluster_sets[lab], noise_count)
                indices = np.union1d(signal, np.asarray(noise, dtype=np.int64))
            else:
                indices = signal
            yield uid, indices

    return gen(), truth


def generate_planted(params: PlantedParams) -> tuple[MemoryStream, GroundTruth]:
    """Materialize a planted instance in memory; deterministic per seed."""
    gen, truth = _planted_records(params)
    records = [
        (uid, SparseBinaryVector(indices, params.n)) for uid, indices in gen
    ]
    return MemoryStream(records, params.n), truth


def write_planted(params: PlantedParams, graph_path, truth_path=None) -> GroundTruth:
    """Stream a planted instance to disk in adjacency format.

    Record by record, so arbitrarily large instances never reside in memory.
    The byte stream matches :func:`generate_planted` for the same params.
    """
    gen, truth = _planted_records(params)
    with Path(graph_path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"%sofa n={params.n} m={params.m}\n")
        for _, indices in gen:
            fh.write(" ".join(map(str, indices.tolist())))
            fh.write("\n")
    if truth_path is not None:
        write_ground_truth(truth, truth_path, n=params.n)
    return truth


def write_ground_truth(truth: GroundTruth, path, n: int) -> None:
    m = truth.left_labels.size
    k = len(truth.right_clusters)
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"%sofa-truth k={k} n={n} m={m}\n")
        for i, cluster in enumerate(truth.right_clusters):
            ids = " ".join(map(str, cluster.tolist()))
            fh.write(f"V\t{i}\t{ids}\n")
        for uid, lab in enumerate(truth.left_labels.tolist()):
            fh.write(f"U\t{uid}\t{lab}\n")


def read_ground_truth(path) -> GroundTruth:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("%sofa-truth"):
        raise StreamFormatError("missing %sofa-truth header")
    header = dict(tok.split("=") for tok in lines[0].split()[1:])
    k, m = int(header["k"]), int(header["m"])
    clusters: dict[int, np.ndarray] = {}
    labels = np.full(m, -1, dtype=np.int64)
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split("\t")
        if parts[0] == "V":
            ids = parts[2].split() if len(parts) > 2 else []
            clusters[int(parts[1])] = np.asarray(sorted(map(int, ids)), dtype=np.int64)
        elif parts[0] == "U":
            labels[int(parts[1])] = int(parts[2])
        else:
            raise StreamFormatError(f"bad ground-truth line: {line!r}")
    if sorted(clusters) != list(range(k)) or np.any(labels < 0):
        raise StreamFormatError("incomplete ground-truth file")
    return GroundTruth(left_labels=labels, right_clusters=[clusters[i] for i in range(k)])
