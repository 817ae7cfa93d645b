"""From converged phase fields to shapes: thresholding, labeling, comparison."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .grid import GridField, GridGeometry

__all__ = [
    "ShapeMask",
    "ComponentSet",
    "extract_shape",
    "connected_components",
    "iou",
]


@dataclass(frozen=True, eq=False)
class ShapeMask:
    """Cells whose phase value strictly exceeds the threshold."""

    geometry: GridGeometry
    inside: np.ndarray
    threshold: float

    def __post_init__(self) -> None:
        m = np.array(self.inside, dtype=bool)
        if m.shape != self.geometry.shape:
            raise ValueError(
                f"mask shape {m.shape} does not match grid shape {self.geometry.shape}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "inside", m)

    def count(self) -> int:
        return int(self.inside.sum())


@dataclass(frozen=True, eq=False)
class ComponentSet:
    """4-connected components labeled 1..count in raster first-encounter order."""

    count: int
    labels: np.ndarray
    areas: tuple[int, ...]
    centroids: tuple[tuple[float, float], ...]


def extract_shape(z: GridField, threshold: float = 0.5) -> ShapeMask:
    """Strict-inequality thresholding; cells exactly at the threshold stay out."""
    if not (0.0 < threshold < 1.0):
        raise ValueError("threshold must lie strictly between 0 and 1")
    return ShapeMask(z.geometry, z.values > threshold, threshold)


def connected_components(mask: ShapeMask) -> ComponentSet:
    """Label 4-connected components by breadth-first flood fill.

    Labels are assigned in the raster order of each component's first cell,
    so the labeling is deterministic.  Centroids are mean (row, col) cell
    indices.
    """
    inside = mask.inside
    rows, cols = inside.shape
    labels = np.zeros(inside.shape, dtype=int)
    areas: list[int] = []
    centroids: list[tuple[float, float]] = []
    count = 0
    for i0 in range(rows):
        for j0 in range(cols):
            if not inside[i0, j0] or labels[i0, j0]:
                continue
            count += 1
            area = 0
            row_sum = 0
            col_sum = 0
            queue = deque([(i0, j0)])
            labels[i0, j0] = count
            while queue:
                i, j = queue.popleft()
                area += 1
                row_sum += i
                col_sum += j
                if i > 0 and inside[i - 1, j] and not labels[i - 1, j]:
                    labels[i - 1, j] = count
                    queue.append((i - 1, j))
                if i + 1 < rows and inside[i + 1, j] and not labels[i + 1, j]:
                    labels[i + 1, j] = count
                    queue.append((i + 1, j))
                if j > 0 and inside[i, j - 1] and not labels[i, j - 1]:
                    labels[i, j - 1] = count
                    queue.append((i, j - 1))
                if j + 1 < cols and inside[i, j + 1] and not labels[i, j + 1]:
                    labels[i, j + 1] = count
                    queue.append((i, j + 1))
            areas.append(area)
            centroids.append((row_sum / area, col_sum / area))
    labels.setflags(write=False)
    return ComponentSet(count, labels, tuple(areas), tuple(centroids))


def iou(a: ShapeMask, b: ShapeMask) -> float:
    """Intersection over union; two empty masks count as identical."""
    if a.geometry != b.geometry:
        raise ValueError("masks live on different grids")
    union = int(np.logical_or(a.inside, b.inside).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(a.inside, b.inside).sum())
    return inter / union
