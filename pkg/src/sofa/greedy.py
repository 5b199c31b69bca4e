"""Distance-threshold greedy clustering of the left stream.

Every arriving vertex either opens a new center (when farther than the
threshold from all of them) or is absorbed into its closest center, feeding
that center's frequent-items summary.  With a separation threshold and a
rounding threshold matched to the generating model this recovers planted
right clusters exactly; see :func:`theory_alpha` and :func:`theory_theta`.
"""

from __future__ import annotations

from typing import Sequence

from sofa.centers import WeightedCenter
from sofa.sketch import MGSketch
from sofa.stream_io import StreamSource
from sofa.vectors import SYMMETRIC, DistanceMetric, nearest_center

__all__ = ["greedy_pass", "threshold_clusters", "theory_alpha", "theory_theta"]

# Default separation constant for the known-parameter regime.  The center
# separation argument needs roughly 2.062 * (1/2 + 2*K1) with K1 the small
# noise constant; 2.1 leaves headroom for K1 > 0 and stays overridable.
DEFAULT_K4 = 2.1


def theory_alpha(s: int, k4: float = DEFAULT_K4) -> float:
    """Separation threshold 0.49 * k4 * s for the known-parameter regime."""
    return 0.49 * k4 * s


def theory_theta(p: float) -> float:
    """Rounding threshold 0.75 * p for the known-parameter regime."""
    return 0.75 * p


def greedy_pass(
    stream: StreamSource,
    alpha_threshold: float,
    sketch_capacity: int,
    metric: DistanceMetric = SYMMETRIC,
) -> list[WeightedCenter]:
    """One pass of threshold-greedy clustering; deterministic in stream order.

    A vertex whose minimum center distance exceeds ``alpha_threshold`` opens
    a center of weight 1 whose summary is seeded with its own neighborhood;
    otherwise its neighbor ids are inserted, unit weight each, into the
    closest center's summary.  The default metric is symmetric Hamming.
    """
    centers: list[WeightedCenter] = []
    for _, vec in stream.records():
        idx, dist = nearest_center(vec, centers, metric)
        if idx is None or dist > alpha_threshold:
            sketch = MGSketch.from_indices(vec.indices, sketch_capacity)
            centers.append(WeightedCenter(vec, 1, sketch, len(centers)))
        else:
            target = centers[idx]
            target.weight += 1
            for j in vec.indices.tolist():
                target.sketch.insert(j)
    return centers


def threshold_clusters(
    centers: Sequence[WeightedCenter], theta: float
) -> list[list[int]]:
    """Right cluster per center: items whose counter reaches theta * weight."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    out: list[list[int]] = []
    for c in centers:
        cut = theta * c.weight
        out.append(sorted(j for j, est in c.sketch.entries() if est >= cut))
    return out
