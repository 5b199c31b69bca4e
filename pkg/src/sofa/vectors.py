"""Sparse binary vectors and the distances shared by all clustering passes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SparseBinaryVector",
    "DistanceMetric",
    "SYMMETRIC",
    "hamming",
    "asym_hamming",
    "nearest_center",
]


class SparseBinaryVector:
    """A vector in {0,1}^n stored as a sorted array of its 1-coordinates.

    Values are immutable after construction.  ``indices`` must be strictly
    increasing and every index must lie in ``[0, n)``; the empty vector is
    legal, as is a universe of size zero.
    """

    __slots__ = ("indices", "n")

    def __init__(self, indices: Iterable[int], n: int):
        arr = np.ascontiguousarray(indices, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        n = int(n)
        if n < 0:
            raise ValueError("universe size must be nonnegative")
        if arr.size:
            if arr[0] < 0 or arr[-1] >= n:
                raise ValueError(f"indices must lie in [0, {n})")
            if arr.size > 1 and not np.all(arr[1:] > arr[:-1]):
                raise ValueError("indices must be strictly increasing")
        arr.setflags(write=False)
        self.indices = arr
        self.n = n

    @classmethod
    def from_iterable(cls, items: Iterable[int], n: int) -> "SparseBinaryVector":
        """Build a vector from an unordered iterable (duplicates collapse)."""
        return cls(np.unique(np.fromiter(items, dtype=np.int64)), n)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBinaryVector):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.indices, other.indices)

    def __hash__(self) -> int:
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        shown = ", ".join(map(str, self.indices[:8]))
        if len(self) > 8:
            shown += ", ..."
        return f"SparseBinaryVector([{shown}], n={self.n})"

    def to_set(self) -> set[int]:
        return set(self.indices.tolist())

    def intersection_size(self, other: "SparseBinaryVector") -> int:
        return _intersection_size(self.indices, other.indices)


def _intersection_size(a: np.ndarray, b: np.ndarray) -> int:
    if a.size == 0 or b.size == 0:
        return 0
    return int(np.intersect1d(a, b, assume_unique=True).size)


@dataclass(frozen=True)
class DistanceMetric:
    """Asymmetry weight for the weighted Hamming distance.

    ``alpha`` is the cost of a coordinate where the center has a 1 and the
    point a 0; point-only 1s always cost 1.  ``alpha = 1`` recovers the
    symmetric Hamming distance; ``alpha < 1`` promotes denser centers.
    """

    alpha: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")


SYMMETRIC = DistanceMetric(1.0)


def _check_universe(x: SparseBinaryVector, y: SparseBinaryVector) -> None:
    if x.n != y.n:
        raise ValueError(f"universe size mismatch: {x.n} != {y.n}")


def hamming(x: SparseBinaryVector, y: SparseBinaryVector) -> int:
    """Number of coordinates where ``x`` and ``y`` differ."""
    _check_universe(x, y)
    return len(x) + len(y) - 2 * _intersection_size(x.indices, y.indices)


def asym_hamming(
    center: SparseBinaryVector, point: SparseBinaryVector, metric: DistanceMetric
) -> float:
    """Weighted Hamming distance from ``center`` to ``point``.

    Coordinates where only the point is set cost 1, coordinates where only
    the center is set cost ``metric.alpha``.  Not symmetric for alpha < 1.
    """
    _check_universe(center, point)
    inter = _intersection_size(center.indices, point.indices)
    return metric.alpha * (len(center) - inter) + float(len(point) - inter)


def nearest_center(
    point: SparseBinaryVector,
    centers: Sequence,
    metric: DistanceMetric,
) -> tuple[int | None, float]:
    """Index and distance of the closest center, scanning in order.

    ``centers`` is an ordered collection of objects with a ``vector``
    attribute.  Ties go to the lowest index; an empty collection yields
    ``(None, inf)``.
    """
    best_i: int | None = None
    best_d = math.inf
    for i, c in enumerate(centers):
        d = asym_hamming(c.vector, point, metric)
        if d < best_d:
            best_i, best_d = i, d
    return best_i, best_d
