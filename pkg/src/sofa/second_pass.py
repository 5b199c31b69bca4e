"""Second pass over the stream: recover left clusters from right clusters.

Two regimes: exclusive assignment by relative overlap (biclustering), and
greedy covering with an overcover penalty (Boolean matrix factorization),
where a vertex may join several clusters.  Several cluster sets (for example
one per rounding threshold) can be processed concurrently in one pass.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from sofa.stream_io import StreamSource

__all__ = [
    "score",
    "assign_left",
    "assign_left_multi",
    "cover_left",
    "cover_left_multi",
    "select_top_k",
    "prune_membership",
]


def score(candidate: Iterable[int], target: Iterable[int], covered: Iterable[int]) -> int:
    """Covering score of ``candidate`` for ``target`` given ``covered``:
    |(target \\ covered) & candidate| - |candidate \\ (target | covered)|."""
    cand = set(candidate)
    tgt = set(target)
    cov = set(covered)
    return len((tgt - cov) & cand) - len(cand - tgt - cov)


class _ClusterIndex:
    """Inverted index over cluster members, for per-record overlap counts."""

    def __init__(self, clusters: Sequence[Sequence[int]]):
        self.k = len(clusters)
        self.sizes = np.array([len(c) for c in clusters], dtype=np.int64)
        self.members = [np.asarray(sorted(c), dtype=np.int64) for c in clusters]
        inv: dict[int, list[int]] = {}
        for i, cluster in enumerate(self.members):
            for j in cluster.tolist():
                inv.setdefault(j, []).append(i)
        self.inv = {j: np.asarray(ids, dtype=np.int64) for j, ids in inv.items()}

    def overlap(self, indices: np.ndarray) -> np.ndarray:
        counts = np.zeros(self.k, dtype=np.int64)
        inv = self.inv
        for j in indices.tolist():
            ids = inv.get(j)
            if ids is not None:
                counts[ids] += 1
        return counts


def assign_left_multi(
    stream: StreamSource, cluster_sets: Sequence[Sequence[Sequence[int]]]
) -> list[dict[int, int | None]]:
    """One stream pass, one exclusive assignment per cluster set.

    A vertex goes to the nonempty cluster maximizing |overlap| / |cluster|,
    ties to the lowest cluster id; vertices overlapping nothing stay
    unassigned (None).
    """
    indexes = [_ClusterIndex(cs) for cs in cluster_sets]
    ratios_den = [np.maximum(ix.sizes, 1) for ix in indexes]
    outs: list[dict[int, int | None]] = [{} for _ in cluster_sets]
    for uid, vec in stream.records():
        for t, ix in enumerate(indexes):
            if ix.k == 0:
                outs[t][uid] = None
                continue
            counts = ix.overlap(vec.indices)
            ratios = counts / ratios_den[t]
            ratios[ix.sizes == 0] = -1.0
            best = int(np.argmax(ratios))
            outs[t][uid] = best if ratios[best] > 0 else None
    return outs


def assign_left(
    stream: StreamSource, right_clusters: Sequence[Sequence[int]]
) -> dict[int, int | None]:
    """Exclusive left assignment for a single cluster set."""
    return assign_left_multi(stream, [right_clusters])[0]


def cover_left_multi(
    stream: StreamSource, cluster_sets: Sequence[Sequence[Sequence[int]]]
) -> list[tuple[dict[int, tuple[int, ...]], list[int]]]:
    """One stream pass, one greedy covering per cluster set.

    Per vertex, repeatedly pick the cluster with the highest covering score
    (ties to the lowest id, no cluster picked twice) while the score is
    positive; each accepted step shrinks the symmetric difference between
    the neighborhood and the covered set by exactly the accepted score.
    Returns per set the vertex memberships and the accumulated per-cluster
    score totals.
    """
    indexes = [_ClusterIndex(cs) for cs in cluster_sets]
    results: list[tuple[dict[int, tuple[int, ...]], list[int]]] = [
        ({}, np.zeros(ix.k, dtype=np.int64)) for ix in indexes
    ]
    for uid, vec in stream.records():
        for t, ix in enumerate(indexes):
            membership, totals = results[t]
            if ix.k == 0:
                membership[uid] = ()
                continue
            x_set = set(vec.indices.tolist())
            c_x = ix.overlap(vec.indices)
            c_y = np.zeros(ix.k, dtype=np.int64)
            c_xy = np.zeros(ix.k, dtype=np.int64)
            picked = np.zeros(ix.k, dtype=bool)
            covered: set[int] = set()
            chosen: list[int] = []
            while True:
                # score(A | X, Y) = 2|A&X| + |A&Y| - 2|A&X&Y| - |A|
                scores = 2 * c_x + c_y - 2 * c_xy - ix.sizes
                scores = np.where(picked, np.iinfo(np.int64).min, scores)
                best = int(np.argmax(scores))
                if scores[best] <= 0:
                    break
                chosen.append(best)
                totals[best] += scores[best]
                picked[best] = True
                for j in ix.members[best].tolist():
                    if j in covered:
                        continue
                    covered.add(j)
                    ids = ix.inv[j]
                    c_y[ids] += 1
                    if j in x_set:
                        c_xy[ids] += 1
            membership[uid] = tuple(sorted(chosen))
    return [(membership, totals.tolist()) for membership, totals in results]


def cover_left(
    stream: StreamSource, right_clusters: Sequence[Sequence[int]]
) -> tuple[dict[int, tuple[int, ...]], list[int]]:
    """Greedy covering for a single cluster set."""
    return cover_left_multi(stream, [right_clusters])[0]


def select_top_k(
    right_clusters: Sequence[Sequence[int]],
    totals: Sequence[int],
    k: int,
) -> tuple[list[list[int]], list[int]]:
    """Keep the k clusters with the highest totals (ties to the lower index),
    preserving the original relative order; returns (clusters, kept indices)."""
    if len(right_clusters) != len(totals):
        raise ValueError("one total per cluster required")
    if len(right_clusters) <= k:
        return [list(c) for c in right_clusters], list(range(len(right_clusters)))
    ranked = sorted(range(len(totals)), key=lambda i: (-totals[i], i))[:k]
    kept = sorted(ranked)
    return [list(right_clusters[i]) for i in kept], kept


def prune_membership(
    membership: dict[int, tuple[int, ...]], kept: Sequence[int]
) -> dict[int, tuple[int, ...]]:
    """Drop memberships of pruned clusters and renumber to the kept order."""
    remap = {old: new for new, old in enumerate(kept)}
    return {
        uid: tuple(remap[i] for i in ids if i in remap)
        for uid, ids in membership.items()
    }
