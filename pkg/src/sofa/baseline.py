"""Non-streaming reference algorithms.

``static_sofa`` clusters all left vectors offline and rounds exact
per-cluster frequency counts, an upper-bound baseline for the streaming
pass.  ``rs_reduction`` turns any static right-cluster algorithm into a
streaming one by reservoir-sampling a subgraph, solving it statically and
re-attaching the sampled-out right vertices by mean left-incidence.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from sofa.kmedians import kmedians_local_search
from sofa.stream_io import StreamSource
from sofa.vectors import DistanceMetric, SparseBinaryVector

__all__ = [
    "StaticBudgetError",
    "static_sofa",
    "static_sofa_sweep",
    "reservoir_sample",
    "rs_reduction",
]

# offline clustering is quadratic in the point count; refuse instances that
# would not fit the configured memory budget instead of thrashing
DEFAULT_MAX_POINTS = 200_000


class StaticBudgetError(RuntimeError):
    """The dataset exceeds the configured offline memory budget."""


def _as_vectors(records: Sequence) -> list[SparseBinaryVector]:
    out = []
    for item in records:
        out.append(item if isinstance(item, SparseBinaryVector) else item[1])
    return out


def static_sofa_sweep(
    records: Sequence,
    k: int,
    thetas: Sequence[float],
    metric: DistanceMetric,
    seed: int = 0,
    max_points: int = DEFAULT_MAX_POINTS,
) -> list[tuple[float, list[list[int]]]]:
    """Offline clustering once, exact-count thresholding per theta."""
    vectors = _as_vectors(records)
    if not vectors:
        raise ValueError("records must be nonempty")
    if not thetas:
        raise ValueError("thetas must be nonempty")
    if len(vectors) > max_points:
        raise StaticBudgetError(
            f"{len(vectors)} records exceed the offline budget of {max_points}"
        )
    n = vectors[0].n
    result = kmedians_local_search(vectors, k, metric, seed=seed)
    groups = result.groups()
    counts = []
    for group in groups:
        if group:
            concat = np.concatenate([vectors[i].indices for i in group])
            counts.append(np.bincount(concat, minlength=n))
        else:
            counts.append(np.zeros(n, dtype=np.int64))
    out = []
    for theta in thetas:
        if theta <= 0:
            raise ValueError("theta must be positive")
        clusters = []
        for group, cnt in zip(groups, counts):
            cut = theta * len(group)
            clusters.append(np.flatnonzero(cnt >= cut).tolist() if group else [])
        out.append((float(theta), clusters))
    return out


def static_sofa(
    records: Sequence,
    k: int,
    theta: float,
    metric: DistanceMetric,
    seed: int = 0,
    max_points: int = DEFAULT_MAX_POINTS,
) -> list[list[int]]:
    """Offline k-medians over all left vectors, thresholded at theta."""
    return static_sofa_sweep(records, k, [theta], metric, seed, max_points)[0][1]


def reservoir_sample(items, size: int, rng: np.random.Generator) -> list:
    """Uniform sample of ``size`` items from a single pass over ``items``."""
    if size < 1:
        raise ValueError("sample size must be positive")
    sample: list = []
    for t, item in enumerate(items):
        if t < size:
            sample.append(item)
        else:
            j = int(rng.integers(0, t + 1))
            if j < size:
                sample[j] = item
    return sample


def rs_reduction(
    stream: StreamSource,
    m_tilde: int,
    n_tilde: int,
    static_algo: Callable[[list[SparseBinaryVector]], list[list[int]]],
    seed: int = 0,
) -> list[list[int]]:
    """Reservoir-sample the stream, solve the induced subgraph statically,
    then attach the dropped low-degree right vertices.

    The sample keeps ``m_tilde`` uniformly random left vertices.  Among
    their neighbors, the ``n_tilde`` of highest degree into the sample (ties
    to the lower id) form the static instance; every remaining neighbor is
    appended to the cluster whose mean left-incidence vector over the sample
    is closest in Euclidean distance (ties to the lowest cluster).
    """
    if n_tilde < 1:
        raise ValueError("sample sizes must be positive")
    rng = np.random.default_rng(seed)
    reservoir = [
        vec for _, vec in reservoir_sample(stream.records(), m_tilde, rng)
    ]
    if not reservoir:
        return []
    n = reservoir[0].n

    sample_degree = np.zeros(n, dtype=np.int64)
    for vec in reservoir:
        sample_degree[vec.indices] += 1
    v_prime = np.flatnonzero(sample_degree)
    if v_prime.size > n_tilde:
        order = np.lexsort((v_prime, -sample_degree[v_prime]))
        v_keep = np.sort(v_prime[order[:n_tilde]])
    else:
        v_keep = v_prime
    keep_mask = np.zeros(n, dtype=bool)
    keep_mask[v_keep] = True

    restricted = [
        SparseBinaryVector(vec.indices[keep_mask[vec.indices]], n) for vec in reservoir
    ]
    clusters = [sorted(c) for c in static_algo(restricted)]

    dropped = np.setdiff1d(v_prime, v_keep, assume_unique=True)
    if dropped.size == 0:
        return clusters

    # mean left-incidence of each cluster over the sample, fixed before
    # any augmentation
    incidence: dict[int, np.ndarray] = {}
    for pos, vec in enumerate(reservoir):
        for j in vec.indices.tolist():
            incidence.setdefault(j, []).append(pos)
    incidence = {j: np.asarray(p, dtype=np.int64) for j, p in incidence.items()}

    means = []
    for cluster in clusters:
        if not cluster:
            means.append(None)
            continue
        acc = np.zeros(len(reservoir))
        for j in cluster:
            pos = incidence.get(j)
            if pos is not None:
                acc[pos] += 1.0
        means.append(acc / len(cluster))
    if all(mean is None for mean in means):
        return clusters

    additions: list[list[int]] = [[] for _ in clusters]
    for v in dropped.tolist():
        x_v = np.zeros(len(reservoir))
        x_v[incidence[v]] = 1.0
        best_i = None
        best_d = np.inf
        for i, mean in enumerate(means):
            if mean is None:
                continue
            d = float(np.linalg.norm(mean - x_v))
            if d < best_d:
                best_i, best_d = i, d
        additions[best_i].append(v)
    return [sorted(c + add) for c, add in zip(clusters, additions)]
