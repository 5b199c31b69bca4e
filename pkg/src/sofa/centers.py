"""Weighted centers retained by the streaming passes."""

from __future__ import annotations

from dataclasses import dataclass

from sofa.sketch import MGSketch
from sofa.vectors import SparseBinaryVector

__all__ = ["WeightedCenter"]


@dataclass
class WeightedCenter:
    """A retained left vertex: its neighborhood, accumulated weight and
    the frequent-items summary of everything assigned to it."""

    vector: SparseBinaryVector
    weight: int
    sketch: MGSketch
    insertion_order: int

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError("center weight must be at least 1")
