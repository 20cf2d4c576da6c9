"""Zeros of a scalogram, found as strict local minima of its modulus."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hyperbolic import UHPPoint, Window
from .wavelet import Scalogram, TimeScaleGrid

__all__ = ["UHPPoint", "ZeroSet", "extract_zeros", "zero_density_map"]


@dataclass(frozen=True)
class ZeroSet:
    x: np.ndarray
    y: np.ndarray
    source_grid: TimeScaleGrid | None = None
    rows: np.ndarray | None = field(default=None, repr=False)
    cols: np.ndarray | None = field(default=None, repr=False)
    alpha: float | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise ValueError("x and y must have equal length")
        if np.any(y <= 0):
            raise ValueError("zeros must lie in the upper half-plane")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x.size

    @property
    def points(self) -> list[UHPPoint]:
        return [UHPPoint(float(a), float(b)) for a, b in zip(self.x, self.y)]

    def subset(self, keep) -> "ZeroSet":
        keep = np.asarray(keep)
        pick = lambda a: None if a is None else a[keep]
        return ZeroSet(self.x[keep], self.y[keep], self.source_grid, pick(self.rows), pick(self.cols), self.alpha)

    def scaled(self, c: float) -> "ZeroSet":
        """Image under ``z -> c z`` (grid bookkeeping dropped)."""
        return ZeroSet(self.x * c, self.y * c, alpha=self.alpha)

    @property
    def coverage(self) -> Window | None:
        """Rectangle over which the zero set is complete, if a source grid is known."""
        g = self.source_grid
        if g is None or g.scales.size < 3:
            return None
        edges = g.scale_edges
        return Window(float(g.times[0]), float(g.times[-1]), float(edges[0]), float(edges[-1]))

    @classmethod
    def from_points(cls, points, **kw) -> "ZeroSet":
        pts = list(points)
        return cls(np.array([p.x for p in pts], dtype=float), np.array([p.y for p in pts], dtype=float), **kw)


def local_minima(mod: np.ndarray, neighborhood: str = "four") -> np.ndarray:
    """Boolean mask of interior strict local minima; border rows/columns are never set."""
    mod = np.asarray(mod)
    if mod.ndim != 2 or mod.shape[0] < 3 or mod.shape[1] < 3:
        raise ValueError(f"need at least a 3x3 grid, got shape {mod.shape}")
    c = mod[1:-1, 1:-1]
    m = (c < mod[:-2, 1:-1]) & (c < mod[2:, 1:-1]) & (c < mod[1:-1, :-2]) & (c < mod[1:-1, 2:])
    if neighborhood == "eight":
        m &= (c < mod[:-2, :-2]) & (c < mod[:-2, 2:]) & (c < mod[2:, :-2]) & (c < mod[2:, 2:])
    elif neighborhood != "four":
        raise ValueError(f"unknown neighborhood {neighborhood!r}")
    out = np.zeros(mod.shape, dtype=bool)
    out[1:-1, 1:-1] = m
    return out


def _vertex_offset(left, mid, right):
    # vertex of the parabola through (-1, left), (0, mid), (1, right)
    den = left - 2 * mid + right
    with np.errstate(divide="ignore", invalid="ignore"):
        off = np.where(den > 0, 0.5 * (left - right) / den, 0.0)
    return np.clip(off, -0.5, 0.5)


def extract_zeros(scalogram: Scalogram, neighborhood: str = "four", refine: bool = False) -> ZeroSet:
    """Grid points whose modulus is strictly below all axis neighbours.

    ``neighborhood="eight"`` additionally requires the diagonals.  With
    ``refine`` the positions are moved to the vertex of a parabola fitted
    through the neighbours along time and log-scale (at most half a cell).
    """
    mod = scalogram.modulus
    rows, cols = np.nonzero(local_minima(mod, neighborhood))
    grid = scalogram.grid
    x = grid.times[cols]
    y = grid.scales[rows]
    if refine and rows.size:
        dt = _vertex_offset(mod[rows, cols - 1], mod[rows, cols], mod[rows, cols + 1])
        dy = _vertex_offset(mod[rows - 1, cols], mod[rows, cols], mod[rows + 1, cols])
        step = np.diff(grid.times)
        x = x + dt * np.where(dt < 0, step[cols - 1], step[cols])
        y = y * np.exp(dy * grid.log_ratio)
    return ZeroSet(x, y, grid, rows, cols, scalogram.params.alpha)


def zero_density_map(zeros: ZeroSet, window: Window) -> int:
    """Number of zeros inside the (closed) window."""
    return int(np.count_nonzero(window.contains(zeros.x, zeros.y)))
