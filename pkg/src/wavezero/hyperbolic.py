"""Pseudo-hyperbolic geometry on the upper half-plane.

A pseudo-hyperbolic disk of radius ``r`` around ``u + iv`` is the Euclidean
disk with centre ``u + i v (1 + r^2) / (1 - r^2)`` and radius
``2 r v / (1 - r^2)``.  Everything here (membership, bounding boxes, the
region of interest) leans on that identity.  Balls are open.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .wavelet import EDGE_FACTOR, TimeScaleGrid


@dataclass(frozen=True)
class UHPPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError(f"point must lie in the upper half-plane, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def ph_distance_xy(x1, y1, x2, y2):
    """Vectorised ``|z - w| / |z - conj(w)|``."""
    dx = np.subtract(x1, x2)
    num = dx * dx + np.subtract(y1, y2) ** 2
    den = dx * dx + np.add(y1, y2) ** 2
    return np.sqrt(num / den)


def ph_distance(z: UHPPoint, w: UHPPoint) -> float:
    if z.y <= 0 or w.y <= 0:
        raise DomainError("pseudo-hyperbolic distance needs points with y > 0")
    return float(ph_distance_xy(z.x, z.y, w.x, w.y))


def ph_add(a: float, b: float) -> float:
    """Largest distance reachable by a step of length ``a`` followed by one of length ``b``."""
    return (a + b) / (1 + a * b)


@dataclass(frozen=True)
class PHDisk:
    center: UHPPoint
    radius: float

    def __post_init__(self):
        if not 0 < self.radius < 1:
            raise DomainError(f"pseudo-hyperbolic radius must lie in (0, 1), got {self.radius}")

    @property
    def euclidean_center(self) -> tuple[float, float]:
        r2 = self.radius**2
        return self.center.x, self.center.y * (1 + r2) / (1 - r2)

    @property
    def euclidean_radius(self) -> float:
        return 2 * self.radius * self.center.y / (1 - self.radius**2)

    def bbox(self) -> tuple[float, float, float, float]:
        cx, cy = self.euclidean_center
        R = self.euclidean_radius
        return cx - R, cx + R, cy - R, cy + R


def ph_ball_contains(disk: PHDisk, z: UHPPoint) -> bool:
    return ph_distance(disk.center, z) < disk.radius


def hyperbolic_area(disk: PHDisk) -> float:
    """``r^2 / (1 - r^2)``; the expected zero count of the disk is ``alpha`` times this."""
    r2 = disk.radius**2
    return r2 / (1 - r2)


@dataclass(frozen=True)
class Window:
    t_min: float
    t_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.t_min < self.t_max and 0 < self.y_min < self.y_max):
            raise DomainError(f"degenerate window {self}")

    def contains(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        return (x >= self.t_min) & (x <= self.t_max) & (y >= self.y_min) & (y <= self.y_max)


def observation_window(grid: TimeScaleGrid, edge_factor: float = EDGE_FACTOR) -> Window:
    """Part of the grid where zeros are trustworthy.

    Scale range: the cells of the interior rows (boundary rows never carry zeros).
    Time range: shrunk by ``edge_factor * y_max`` on both sides against the
    circular-convolution contamination.
    """
    if grid.scales.size < 3:
        raise DomainError("need at least 3 scales for an observation window")
    edges = grid.scale_edges
    pad = edge_factor * grid.scales[-1]
    return Window(grid.times[0] + pad, grid.times[-1] - pad, float(edges[0]), float(edges[-1]))


def _seg_h(x, y, a, b, c):
    dx = np.maximum(np.maximum(a - x, x - b), 0.0)
    return ph_distance_xy(0.0, y, dx, c)


def _seg_v(x, y, a, c, d):
    dx = np.abs(x - a)
    # foot of the perpendicular geodesic onto the vertical line x = a
    ys = np.clip(np.sqrt(dx * dx + y * y), c, d)
    return ph_distance_xy(x, y, a, ys)


def boundary_distance(x, y, window: Window):
    """Pseudo-hyperbolic distance from points to the window boundary (0 outside)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = window
    d = np.minimum.reduce([
        _seg_h(x, y, w.t_min, w.t_max, w.y_min),
        _seg_h(x, y, w.t_min, w.t_max, w.y_max),
        _seg_v(x, y, w.t_min, w.y_min, w.y_max),
        _seg_v(x, y, w.t_max, w.y_min, w.y_max),
    ])
    return np.where(w.contains(x, y), d, 0.0)


@dataclass(frozen=True)
class RegionOfInterest:
    window: Window
    margin: float

    def __post_init__(self):
        if not 0 <= self.margin < 1:
            raise DomainError(f"margin must lie in [0, 1), got {self.margin}")

    def contains(self, x, y):
        """Points whose pseudo-hyperbolic distance to the window boundary exceeds the margin.

        Equivalent to the closed ball of radius ``margin`` lying inside the
        open window, which is a Euclidean disk test.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        w = self.window
        m = self.margin
        if m == 0:
            return (x > w.t_min) & (x < w.t_max) & (y > w.y_min) & (y < w.y_max)
        R = 2 * m * y / (1 - m * m)
        lo = y * (1 - m) / (1 + m)
        hi = y * (1 + m) / (1 - m)
        return (x - R > w.t_min) & (x + R < w.t_max) & (lo > w.y_min) & (hi < w.y_max)

    def grid_mask(self, grid: TimeScaleGrid) -> np.ndarray:
        return self.contains(grid.times[None, :], grid.scales[:, None])


def roi_filter(points_or_grid, roi: RegionOfInterest):
    """Keep what lies inside the region of interest.

    Accepts a zero set (returns a zero set), a sequence of points (returns a
    list) or a grid (returns a boolean mask of grid shape, since the region
    is not a sub-rectangle of the grid).
    """
    if isinstance(points_or_grid, TimeScaleGrid):
        return roi.grid_mask(points_or_grid)
    if hasattr(points_or_grid, "subset"):
        keep = roi.contains(points_or_grid.x, points_or_grid.y)
        return points_or_grid.subset(keep)
    pts = list(points_or_grid)
    if not pts:
        return []
    keep = roi.contains([p.x for p in pts], [p.y for p in pts])
    return [p for p, k in zip(pts, keep) if k]
