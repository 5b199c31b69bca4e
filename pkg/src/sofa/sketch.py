"""Mergeable Misra-Gries frequent-items summaries with weighted inserts.

Each summary keeps at most ``capacity`` live counters.  Estimates never
exceed the true frequency and undershoot by at most
``total_weight / (capacity + 1)``, for every item and every stream prefix.
Two summaries of equal capacity merge into one that keeps the same guarantee
for the concatenated stream.
"""

from __future__ import annotations

import heapq
from typing import Iterable

__all__ = ["MGSketch"]


class MGSketch:
    __slots__ = ("capacity", "counters", "total_weight")

    def __init__(self, capacity: int):
        capacity = int(capacity)
        if capacity < 1:
            raise ValueError("capacity must be a positive integer")
        self.capacity = capacity
        self.counters: dict[int, float] = {}
        self.total_weight = 0.0

    @classmethod
    def from_indices(cls, indices: Iterable[int], capacity: int) -> "MGSketch":
        """Summary of one unit-weight occurrence per index."""
        sk = cls(capacity)
        for j in indices:
            sk.insert(int(j))
        return sk

    def __len__(self) -> int:
        return len(self.counters)

    def __repr__(self) -> str:
        return (
            f"MGSketch(capacity={self.capacity}, live={len(self.counters)}, "
            f"total_weight={self.total_weight})"
        )

    def insert(self, item: int, weight: float = 1.0) -> None:
        """Add ``weight`` occurrences of ``item``.

        When the table is full and the item untracked, the classic decrement
        applies with real-valued step ``min(weight, smallest counter)``; this
        single step equals repeated unit decrements.
        """
        if weight <= 0:
            raise ValueError("weight must be positive")
        w = float(weight)
        self.total_weight += w
        counters = self.counters
        if item in counters:
            counters[item] += w
            return
        if len(counters) < self.capacity:
            counters[item] = w
            return
        delta = min(w, min(counters.values()))
        survivors = {}
        for k, v in counters.items():
            v -= delta
            if v > 0:
                survivors[k] = v
        rem = w - delta
        if rem > 0:
            survivors[item] = rem
        self.counters = survivors
        assert len(self.counters) <= self.capacity

    def estimate(self, item: int) -> float:
        """Current estimate for ``item``; 0 when untracked."""
        return self.counters.get(item, 0.0)

    def entries(self) -> list[tuple[int, float]]:
        """All live counters as (item, estimate), ascending by item."""
        return sorted(self.counters.items())

    def copy(self) -> "MGSketch":
        dup = MGSketch(self.capacity)
        dup.counters = dict(self.counters)
        dup.total_weight = self.total_weight
        return dup

    def absorb(self, other: "MGSketch") -> None:
        """In-place merge: counter-wise sum, then reduce back to capacity.

        The reduction subtracts the (capacity+1)-largest combined value and
        evicts non-positive counters.
        """
        if self.capacity != other.capacity:
            raise ValueError("cannot merge sketches of different capacity")
        counters = self.counters
        for k, v in other.counters.items():
            counters[k] = counters.get(k, 0.0) + v
        self.total_weight += other.total_weight
        if len(counters) > self.capacity:
            pivot = heapq.nlargest(self.capacity + 1, counters.values())[-1]
            self.counters = {k: v - pivot for k, v in counters.items() if v > pivot}
        assert len(self.counters) <= self.capacity

    def merge(self, other: "MGSketch") -> "MGSketch":
        """Merged copy of ``self`` and ``other``; inputs are left untouched."""
        out = self.copy()
        out.absorb(other)
        return out
