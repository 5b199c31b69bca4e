"""Constant-factor k-medians over weighted sparse binary vectors.

Medoid-based single-swap local search (replace one medoid by one non-medoid
point), started from a greedy farthest-point traversal and stopped when no
single swap improves the weighted cost by more than 0.1%.  Medoids are input
points, so cluster representatives stay as sparse as the data.

Each scan ranks, for every medoid, its best replacement candidate; the
ranked swaps are then applied one at a time, re-checking the exact cost
before each acceptance, so the cost is monotone and the final state is
single-swap optimal up to the stopping threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

from sofa.vectors import DistanceMetric, SparseBinaryVector

__all__ = ["KMediansResult", "kmedians_local_search"]

# relative improvement below which the search stops
_IMPROVEMENT = 1e-3
_MAX_SWEEPS = 500
# candidate rows evaluated per vectorized block, sized to keep the dense
# scratch arrays around a few tens of MB
_BLOCK_ELEMS = 8_000_000


@dataclass
class KMediansResult:
    """Partition of the input points around chosen medoids.

    ``labels[j]`` is the group of point ``j``; group ``g`` is represented by
    point ``medoids[g]``.  When ``k`` exceeds the point count, the trailing
    groups are empty.
    """

    labels: np.ndarray
    medoids: list[int]
    k: int
    cost: float

    def groups(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for j, g in enumerate(self.labels.tolist()):
            out[g].append(j)
        return out


class _DistanceOracle:
    """Rows of the asymmetric distance matrix, computed from one sparse
    Gram product instead of pairwise support merges."""

    def __init__(self, points: Sequence[SparseBinaryVector], alpha: float):
        n = points[0].n
        indptr = np.zeros(len(points) + 1, dtype=np.int64)
        for i, p in enumerate(points):
            if p.n != n:
                raise ValueError("all points must share one universe size")
            indptr[i + 1] = indptr[i] + len(p)
        indices = (
            np.concatenate([p.indices for p in points])
            if indptr[-1]
            else np.zeros(0, dtype=np.int64)
        )
        data = np.ones(indices.size, dtype=np.float32)
        mat = sparse.csr_matrix((data, indices, indptr), shape=(len(points), n))
        self.gram = (mat @ mat.T).tocsr()
        self.deg = np.diff(indptr).astype(np.float32)
        self.alpha = np.float32(alpha)

    def row(self, center: int) -> np.ndarray:
        lo, hi = self.gram.indptr[center], self.gram.indptr[center + 1]
        inter = np.zeros(self.deg.size, dtype=np.float32)
        inter[self.gram.indices[lo:hi]] = self.gram.data[lo:hi]
        return self.alpha * (self.deg[center] - inter) + (self.deg - inter)

    def rows(self, centers: Sequence[int]) -> np.ndarray:
        ids = np.asarray(centers, dtype=np.int64)
        inter = self.gram[ids].toarray()
        out = self.deg[ids][:, None] - inter
        out *= self.alpha
        inter -= self.deg[None, :]
        out -= inter
        return out


def kmedians_local_search(
    points: Sequence[SparseBinaryVector],
    k: int,
    metric: DistanceMetric,
    seed: int = 0,
    weights: Sequence[float] | None = None,
) -> KMediansResult:
    """Cluster ``points`` around ``k`` medoids chosen from the points.

    Deterministic given ``seed``; the cost never increases across accepted
    swaps.  Assignment ties go to the medoid with the lowest point index.
    With ``k >= len(points)`` every point is its own medoid and the extra
    groups stay empty.
    """
    npts = len(points)
    if npts == 0:
        raise ValueError("points must be nonempty")
    if k < 1:
        raise ValueError("k must be at least 1")
    w = np.ones(npts) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (npts,) or np.any(w <= 0):
        raise ValueError("weights must be positive, one per point")

    if k >= npts:
        return KMediansResult(
            labels=np.arange(npts, dtype=np.int64),
            medoids=list(range(npts)),
            k=k,
            cost=0.0,
        )

    oracle = _DistanceOracle(points, metric.alpha)
    rng = np.random.default_rng(seed)

    # farthest-point traversal from a seeded start
    first = int(rng.integers(npts))
    med = [first]
    dmin = oracle.row(first)
    dmin[first] = -np.inf
    while len(med) < k:
        nxt = int(np.argmax(dmin))
        med.append(nxt)
        dmin = np.minimum(dmin, oracle.row(nxt))
        dmin[nxt] = -np.inf
    med.sort()

    block = max(1, min(1024, _BLOCK_ELEMS // npts))
    med_rows = oracle.rows(med)
    is_med = np.zeros(npts, dtype=bool)
    is_med[med] = True
    every = np.arange(npts)

    def exact_cost(rows: np.ndarray) -> float:
        return float(w @ rows.min(axis=0).astype(np.float64))

    for _ in range(_MAX_SWEEPS):
        a1 = np.argmin(med_rows, axis=0)
        d1 = med_rows[a1, every]
        d2 = (
            np.partition(med_rows, 1, axis=0)[1]
            if k > 1
            else np.full(npts, np.inf, dtype=np.float32)
        )
        cost = float(w @ d1.astype(np.float64))
        grouping = sparse.csr_matrix(
            (np.ones(npts, dtype=np.float32), (a1, every)), shape=(k, npts)
        )
        w32 = w.astype(np.float32)

        # best replacement candidate per medoid, by estimated swap delta
        best_delta = np.zeros(k)
        best_cand = np.full(k, -1, dtype=np.int64)
        for lo in range(0, npts, block):
            cands = every[lo : lo + block]
            cands = cands[~is_med[cands]]
            if cands.size == 0:
                continue
            drows = oracle.rows(cands)
            t1 = np.minimum(drows, d1[None, :])
            t1 -= d1[None, :]
            t1 *= w32[None, :]
            gain = t1.sum(axis=1, dtype=np.float64)
            t2 = np.minimum(drows, d2[None, :])
            t2 -= d1[None, :]
            t2 *= w32[None, :]
            t2 -= t1
            # delta[c, m] = gain[c] + sum over points of medoid m of (t2 - t1)
            corr = (grouping @ t2.T).T.astype(np.float64)
            corr += gain[:, None]
            pos = corr.argmin(axis=0)
            vals = corr[pos, np.arange(k)]
            better = vals < best_delta
            best_delta[better] = vals[better]
            best_cand[better] = cands[pos[better]]

        if best_delta.min() >= -_IMPROVEMENT * cost:
            break

        # apply the ranked swaps, re-checking each against the live set
        accepted = 0
        order = sorted(range(k), key=lambda m: (best_delta[m], m))
        for m in order:
            cand = int(best_cand[m])
            if best_delta[m] >= 0 or cand < 0 or is_med[cand]:
                continue
            old_row = med_rows[m].copy()
            med_rows[m] = oracle.row(cand)
            new_cost = exact_cost(med_rows)
            if new_cost < (1.0 - _IMPROVEMENT) * cost:
                is_med[med[m]] = False
                is_med[cand] = True
                med[m] = cand
                cost = new_cost
                accepted += 1
            else:
                med_rows[m] = old_row
        if accepted == 0:
            break
        order = np.argsort(med, kind="stable")
        med = [med[i] for i in order]
        med_rows = med_rows[order]

    a1 = np.argmin(med_rows, axis=0)
    d1 = med_rows[a1, every]
    return KMediansResult(
        labels=a1.astype(np.int64),
        medoids=med,
        k=k,
        cost=float(w @ d1.astype(np.float64)),
    )
