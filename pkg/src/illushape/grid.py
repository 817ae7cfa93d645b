"""Uniform 2-D grids: scalar fields, difference stencils, norms, quadrature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridGeometry",
    "GridField",
    "gradient_magnitude",
    "rms_diff",
    "quadrature_sum",
    "face_means",
    "face_diffs",
]


@dataclass(frozen=True)
class GridGeometry:
    """Pixel grid covering a rectangle whose longest side spans unit length."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 3 or self.height < 3:
            raise ValueError("grid must be at least 3x3")

    @property
    def h(self) -> float:
        """Grid spacing; the longest side is normalized to length 1."""
        return 1.0 / max(self.width, self.height)

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape (rows, cols) = (height, width)."""
        return (self.height, self.width)

    @property
    def cells(self) -> int:
        return self.width * self.height


@dataclass(frozen=True, eq=False)
class GridField:
    """Immutable scalar field sampled at cell centers, stored row-major.

    The value array is copied on construction and marked read-only so fields
    can be shared freely across threads and snapshot consumers.
    """

    geometry: GridGeometry
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise ValueError(
                f"values shape {v.shape} does not match grid shape {self.geometry.shape}"
            )
        if not np.isfinite(v).all():
            raise ValueError("field has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, geometry: GridGeometry):
        return cls(geometry, np.zeros(geometry.shape))

    @classmethod
    def full(cls, geometry: GridGeometry, value: float):
        return cls(geometry, np.full(geometry.shape, float(value)))


def require_same_geometry(a: GridField, b: GridField) -> None:
    if a.geometry != b.geometry:
        raise ValueError("fields live on different grids")


def gradient_magnitude(f: GridField) -> GridField:
    """Cellwise gradient magnitude: central differences inside, one-sided on the rim."""
    gy, gx = np.gradient(f.values, f.geometry.h, edge_order=1)
    return GridField(f.geometry, np.hypot(gx, gy))


def rms_diff(a: GridField, b: GridField) -> float:
    """Root-mean-square difference over all cells; the outer stopping norm."""
    require_same_geometry(a, b)
    d = a.values - b.values
    return float(np.sqrt(np.mean(d * d)))


def quadrature_sum(f: GridField) -> float:
    """Midpoint-rule integral over the domain: h^2 times the cell sum."""
    h = f.geometry.h
    return float(h * h * f.values.sum())


def face_means(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Arithmetic means on x-faces and y-faces between adjacent cells.

    Face arrays have shape (H, W-1) and (H-1, W).  The discrete energy and
    the elliptic operator are both built from these, so they stay consistent
    by construction.
    """
    fx = 0.5 * (values[:, 1:] + values[:, :-1])
    fy = 0.5 * (values[1:, :] + values[:-1, :])
    return fx, fy


def face_diffs(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences on x-faces and y-faces between adjacent cells."""
    dx = values[:, 1:] - values[:, :-1]
    dy = values[1:, :] - values[:-1, :]
    return dx, dy
