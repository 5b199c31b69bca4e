"""Recovery quality and reconstruction metrics, computed streamingly.

Nothing here materializes a dense matrix: the reconstruction error of the
Boolean product of the recovered factors is accumulated row by row from the
stream and the recovered clusters.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

from sofa.stream_io import StreamSource

__all__ = [
    "quality",
    "reconstruction_stats",
    "membership_from_assignment",
    "metrics_lines",
    "metrics_tsv",
]


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union


def quality(
    ground: Sequence[Iterable[int]], found: Sequence[Iterable[int]]
) -> float:
    """Mean over ground-truth clusters of the best Jaccard match among the
    recovered clusters; 1 means exact recovery as sets."""
    if not ground:
        raise ValueError("ground truth must be nonempty")
    gsets = [set(g) for g in ground]
    fsets = [set(f) for f in found]
    total = 0.0
    for g in gsets:
        total += max((_jaccard(g, f) for f in fsets), default=0.0)
    return total / len(gsets)


def membership_from_assignment(
    assignment: Mapping[int, int | None],
) -> dict[int, tuple[int, ...]]:
    """Exclusive assignment as membership sets (unassigned becomes empty)."""
    return {uid: (() if c is None else (c,)) for uid, c in assignment.items()}


def reconstruction_stats(
    stream: StreamSource,
    left_membership: Mapping[int, tuple[int, ...]],
    right_clusters: Sequence[Sequence[int]],
) -> tuple[float, float]:
    """Relative Hamming gain and recall of the reconstruction.

    Row u of the reconstruction is the union of the clusters u belongs to.
    gain = 1 - mismatches / |E| measures the improvement over the all-zeros
    matrix and may be negative when overcovering dominates; recall is the
    fraction of edges covered.  Raises on an edgeless graph.
    """
    members = [np.asarray(sorted(c), dtype=np.int64) for c in right_clusters]
    union_cache: dict[tuple[int, ...], np.ndarray] = {}

    def row_union(ids: tuple[int, ...]) -> np.ndarray:
        row = union_cache.get(ids)
        if row is None:
            if ids:
                row = np.unique(np.concatenate([members[i] for i in ids]))
            else:
                row = np.zeros(0, dtype=np.int64)
            union_cache[ids] = row
        return row

    edges = 0
    mismatches = 0
    covered = 0
    for uid, vec in stream.records():
        row = row_union(left_membership[uid])
        inter = (
            int(np.intersect1d(vec.indices, row, assume_unique=True).size)
            if len(vec) and row.size
            else 0
        )
        edges += len(vec)
        mismatches += len(vec) + int(row.size) - 2 * inter
        covered += inter
    if edges == 0:
        raise ValueError("graph has no edges; gain and recall are undefined")
    return 1.0 - mismatches / edges, covered / edges


def metrics_lines(values: Mapping[str, object]) -> str:
    """Line-delimited structured text, one key=value per line."""
    return "".join(f"{key}={_fmt(val)}\n" for key, val in values.items())


def metrics_tsv(values: Mapping[str, object]) -> str:
    """Flat TSV: one header row, one value row."""
    keys = list(values)
    head = "\t".join(keys)
    row = "\t".join(_fmt(values[k]) for k in keys)
    return f"{head}\n{row}\n"


def _fmt(val: object) -> str:
    if isinstance(val, float):
        return f"{val:.10g}"
    return str(val)
