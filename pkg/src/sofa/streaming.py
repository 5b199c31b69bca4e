"""One-pass streaming clusterer with importance sampling and restarts.

An arriving vertex opens a new center with probability proportional to its
distance from the current centers (scaled by a lower-bound guess on the
clustering cost), otherwise it is assigned to the closest center, merging
summaries and weights.  Whenever the center budget fills up or the running
cost passes twice the lower bound, the guess doubles and the pass restarts
on the virtual stream made of the weighted centers followed by the unread
suffix.  Postprocessing clusters the surviving centers offline, merges each
group's summaries and rounds them into right clusters.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, IO, Sequence

import numpy as np
from scipy import stats

from sofa.centers import WeightedCenter
from sofa.kmedians import kmedians_local_search
from sofa.sketch import MGSketch
from sofa.stream_io import StreamSource
from sofa.vectors import DistanceMetric, SparseBinaryVector

__all__ = [
    "SofaConfig",
    "PhaseStats",
    "PassStats",
    "default_capacity",
    "sofa_pass",
    "group_centers",
    "threshold_groups",
    "sofa_postprocess",
    "multi_threshold",
    "estimate_theta",
    "DEFAULT_THETA_GRID",
]

DEFAULT_THETA_GRID = (0.3, 0.4, 0.5, 0.6, 0.7)

# restarts double the lower bound, so this many phases means the cost
# estimate overflowed any realistic stream; treat as a bug, not a loop
_PHASE_CEILING = 64


def default_capacity(s: int, n: int) -> int:
    """Default per-center counter budget max{3s, 0.05n}."""
    return int(max(3 * s, math.ceil(0.05 * n)))


@dataclass(frozen=True)
class SofaConfig:
    """Parameters of the streaming pass.

    ``c_max`` defaults to ``20 * k``.  ``thetas`` is either a fixed list of
    rounding thresholds or ``"auto"`` for the likelihood heuristic.
    """

    k: int
    sketch_capacity: int
    c_max: int | None = None
    metric: DistanceMetric = DistanceMetric(0.1)
    seed: int = 0
    thetas: tuple[float, ...] | str = DEFAULT_THETA_GRID

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.sketch_capacity < 1:
            raise ValueError("sketch_capacity must be at least 1")
        if self.c_max is None:
            object.__setattr__(self, "c_max", 20 * self.k)
        if self.c_max <= self.k:
            raise ValueError("c_max must exceed k")
        if isinstance(self.thetas, str):
            if self.thetas != "auto":
                raise ValueError("thetas must be a list of thresholds or 'auto'")
        else:
            object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))


@dataclass
class PhaseStats:
    """Snapshot emitted at the end of each phase."""

    phase: int
    lb: float
    cost: float
    f: float
    n_centers: int
    consumed: int
    base_read: int
    carried_weight: int


@dataclass
class PassStats:
    """Aggregates filled in by :func:`sofa_pass` when provided."""

    phases: int = 0
    records_processed: int = 0
    base_records: int = 0
    peak_entries: int = 0
    phase_log: list[PhaseStats] = field(default_factory=list)


class _CenterIndex:
    """Inverted index over center supports for fast nearest-center queries.

    Distances match ``asym_hamming`` bit for bit: the per-center expression
    is alpha * (deg_c - overlap) + (deg_u - overlap), evaluated elementwise.
    """

    def __init__(self, c_max: int, alpha: float):
        self.alpha = alpha
        self.degs = np.zeros(c_max, dtype=np.float64)
        self.inv: dict[int, list[int]] = {}
        self.count = 0

    def add(self, vec: SparseBinaryVector) -> None:
        cid = self.count
        self.degs[cid] = len(vec)
        for j in vec.indices.tolist():
            self.inv.setdefault(j, []).append(cid)
        self.count += 1

    def nearest(self, vec: SparseBinaryVector) -> tuple[int | None, float]:
        nc = self.count
        if nc == 0:
            return None, math.inf
        hits: list[int] = []
        inv = self.inv
        for j in vec.indices.tolist():
            lst = inv.get(j)
            if lst is not None:
                hits.extend(lst)
        deg_u = float(len(vec))
        if hits:
            overlap = np.bincount(np.asarray(hits, dtype=np.int64), minlength=nc)
            dists = self.alpha * (self.degs[:nc] - overlap) + (deg_u - overlap)
        else:
            dists = self.alpha * self.degs[:nc] + deg_u
        best = int(np.argmin(dists))
        return best, float(dists[best])


def sofa_pass(
    stream: StreamSource,
    cfg: SofaConfig,
    telemetry: IO[str] | None = None,
    on_phase: Callable[[PhaseStats, list[WeightedCenter]], None] | None = None,
    stats: PassStats | None = None,
) -> list[WeightedCenter]:
    """Single pass over the stream; returns at most ``c_max`` weighted centers.

    Center weights conserve the record count exactly: they sum to the number
    of records read.  Deterministic (bit-reproducible) given ``cfg.seed``.
    ``telemetry`` receives one line per phase; ``on_phase`` additionally gets
    the phase snapshot plus the live center list.
    """
    n = stream.n
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    f_denom = cfg.k * (1.0 + (math.log2(n) if n > 1 else 0.0))
    base = stream.records()
    base_read = 0
    base_done = False
    pending: list[WeightedCenter] = []
    lb = 1.0
    phase = 0
    centers: list[WeightedCenter] = []
    cur_entries = 0
    peak_entries = 0
    total_processed = 0

    while not (base_done and not pending):
        phase += 1
        if phase > _PHASE_CEILING:
            raise RuntimeError(
                f"phase ceiling ({_PHASE_CEILING}) exceeded; "
                "lower-bound doubling failed to stabilize"
            )
        f = lb / f_denom
        index = _CenterIndex(cfg.c_max, cfg.metric.alpha)
        centers = []
        cost = 0.0
        consumed = 0
        pend_idx = 0
        flag = False

        while True:
            if pend_idx < len(pending):
                carried = pending[pend_idx]
                pend_idx += 1
                vec, w, sk = carried.vector, carried.weight, carried.sketch
            else:
                try:
                    _, vec = next(base)
                except StopIteration:
                    base_done = True
                    break
                base_read += 1
                w, sk = 1, None
            consumed += 1
            total_processed += 1

            ci, d = index.nearest(vec)
            draw = rng.random()
            if draw < (w * d) / f:  # open with probability min{w*d/f, 1}
                if sk is None:
                    sk = MGSketch.from_indices(vec.indices, cfg.sketch_capacity)
                    cur_entries += len(vec) + len(sk)
                centers.append(WeightedCenter(vec, w, sk, len(centers)))
                index.add(vec)
            else:
                cost += w * d
                target = centers[ci]
                target.weight += w
                before = len(target.sketch)
                if sk is None:
                    target.sketch.absorb(
                        MGSketch.from_indices(vec.indices, cfg.sketch_capacity)
                    )
                    cur_entries += len(target.sketch) - before
                else:
                    target.sketch.absorb(sk)
                    cur_entries += (len(target.sketch) - before) - (len(vec) + len(sk))
            if cur_entries > peak_entries:
                peak_entries = cur_entries
            if len(centers) == cfg.c_max or cost > 2.0 * lb:
                flag = True
                break

        carried_weight = sum(c.weight for c in centers)
        carried_weight += sum(r.weight for r in pending[pend_idx:])
        snapshot = PhaseStats(
            phase=phase,
            lb=lb,
            cost=cost,
            f=f,
            n_centers=len(centers),
            consumed=consumed,
            base_read=base_read,
            carried_weight=carried_weight,
        )
        if telemetry is not None:
            telemetry.write(
                f"phase={phase}\tlb={lb:g}\tcost={cost:.10g}"
                f"\tcenters={len(centers)}\tconsumed={consumed}\n"
            )
        if on_phase is not None:
            on_phase(snapshot, centers)
        if stats is not None:
            stats.phase_log.append(snapshot)

        if flag:
            pending = centers + pending[pend_idx:]
            lb *= 2.0
        else:
            pending = []
            break

    if stats is not None:
        stats.phases = phase
        stats.records_processed = total_processed
        stats.base_records = base_read
        stats.peak_entries = peak_entries
    return centers


def group_centers(
    centers: Sequence[WeightedCenter], cfg: SofaConfig
) -> list[tuple[MGSketch, int]]:
    """Offline k-medians over center vectors; per group the merged summary
    and the total weight.  Independent of the rounding threshold."""
    if not centers:
        raise ValueError("postprocessing requires at least one center")
    k = cfg.k
    if k > len(centers):
        warnings.warn(
            f"requested {k} clusters from {len(centers)} centers; "
            "the extra clusters will be empty",
            stacklevel=2,
        )
        labels = list(range(len(centers)))
    else:
        result = kmedians_local_search(
            [c.vector for c in centers],
            k,
            cfg.metric,
            seed=cfg.seed,
            weights=[c.weight for c in centers],
        )
        labels = result.labels.tolist()
    groups: list[tuple[MGSketch, int]] = []
    members: list[list[int]] = [[] for _ in range(k)]
    for i, g in enumerate(labels):
        members[g].append(i)
    for g in range(k):
        if not members[g]:
            groups.append((MGSketch(cfg.sketch_capacity), 0))
            continue
        merged = centers[members[g][0]].sketch.copy()
        weight = centers[members[g][0]].weight
        for i in members[g][1:]:
            merged.absorb(centers[i].sketch)
            weight += centers[i].weight
        groups.append((merged, weight))
    return groups


def threshold_groups(
    groups: Sequence[tuple[MGSketch, int]], theta: float
) -> list[list[int]]:
    """Round each merged summary: keep items with counter >= theta * weight."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    out = []
    for sketch, weight in groups:
        cut = theta * weight
        out.append(sorted(j for j, est in sketch.entries() if est >= cut))
    return out


def sofa_postprocess(
    centers: Sequence[WeightedCenter], cfg: SofaConfig, theta: float
) -> list[list[int]]:
    """Group the centers offline and round the merged summaries at ``theta``."""
    return threshold_groups(group_centers(centers, cfg), theta)


def multi_threshold(
    centers: Sequence[WeightedCenter],
    cfg: SofaConfig,
    thetas: Sequence[float],
) -> list[tuple[float, list[list[int]]]]:
    """One postprocess per threshold, sharing a single offline grouping."""
    if not thetas:
        raise ValueError("thetas must be nonempty")
    groups = group_centers(centers, cfg)
    return [(float(t), threshold_groups(groups, t)) for t in thetas]


_DEFAULT_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))


def estimate_theta(
    groups: Sequence[tuple[MGSketch, int]],
    grid: Sequence[float] = _DEFAULT_GRID,
) -> float:
    """Pick a rounding threshold by a two-component binomial fit.

    Grid-searches member/non-member rates (p, q) with q < p, scoring each
    pair by the likelihood of the observed counters when every counter is
    assigned to its more likely component; returns the likelihood-ratio
    crossing of the best pair, i.e. the count fraction where the two
    binomials intersect.  Degenerate inputs (fewer than two live counters)
    fall back to 0.5 with a warning.
    """
    if not groups:
        raise ValueError("groups must be nonempty")
    observed: list[tuple[np.ndarray, int]] = []
    live = 0
    for sketch, weight in groups:
        vals = np.array([v for _, v in sketch.entries()], dtype=np.float64)
        if vals.size and weight > 0:
            counts = np.clip(np.rint(vals), 0, weight).astype(np.int64)
            observed.append((counts, int(weight)))
            live += counts.size
    if live < 2:
        warnings.warn(
            "too few live counters to fit a threshold; falling back to 0.5",
            stacklevel=2,
        )
        return 0.5
    best_ll = -np.inf
    best_pair: tuple[float, float] | None = None
    for p_hat in grid:
        for q_hat in grid:
            if q_hat >= p_hat:
                continue
            ll = 0.0
            for counts, weight in observed:
                lp = stats.binom.logpmf(counts, weight, p_hat)
                lq = stats.binom.logpmf(counts, weight, q_hat)
                ll += float(np.maximum(lp, lq).sum())
            if ll > best_ll:
                best_ll = ll
                best_pair = (p_hat, q_hat)
    assert best_pair is not None
    p_hat, q_hat = best_pair
    top = math.log((1.0 - q_hat) / (1.0 - p_hat))
    bottom = math.log(p_hat / q_hat) + top
    return top / bottom
