"""Local estimators of intensity and pair correlation for an observed zero set.

``ZeroIndex`` answers pseudo-hyperbolic disk and ring queries.  Single
queries go through a k-d tree on the Euclidean disks that the
pseudo-hyperbolic disks are; whole rows of centres sharing one scale are
handled by a sweep over the zeros sorted by scale, where every zero adds its
weight to the interval of centres whose disk contains it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, EmptyDiskError, ROIViolation
from .hyperbolic import PHDisk, UHPPoint, Window, boundary_distance, ph_add, ph_distance_xy
from .stats import count_variance, expected_count
from .zeros import ZeroSet

# relative slack on Euclidean query radii; membership is decided by the exact test afterwards
_PAD = 1e-9


def _euclid(v, r):
    r2 = r * r
    return v * (1 + r2) / (1 - r2), 2 * r * v / (1 - r2)


class ZeroIndex:
    def __init__(self, zeros: ZeroSet):
        self.zeros = zeros
        self.order = np.argsort(zeros.y, kind="stable")
        self.xs = zeros.x[self.order]
        self.ys = zeros.y[self.order]
        self._tree = cKDTree(np.column_stack([zeros.x, zeros.y])) if len(zeros) else None
        self._rings: dict = {}

    def __len__(self):
        return len(self.zeros)

    def disk_members(self, center: UHPPoint, r: float) -> np.ndarray:
        """Indices (into the zero set) of zeros with ``d_ph(z, center) < r``."""
        if not 0 < r < 1:
            raise DomainError("radius must lie in (0, 1)")
        if self._tree is None:
            return np.empty(0, dtype=np.int64)
        cy, R = _euclid(center.y, r)
        cand = np.asarray(self._tree.query_ball_point([center.x, cy], R * (1 + _PAD)), dtype=np.int64)
        if cand.size == 0:
            return cand
        d = ph_distance_xy(self.zeros.x[cand], self.zeros.y[cand], center.x, center.y)
        return np.sort(cand[d < r])

    def disk_count(self, center: UHPPoint, r: float) -> int:
        return int(self.disk_members(center, r).size)

    def ring_counts(self, r0_values, h: float) -> np.ndarray:
        """``out[k, i]`` = number of other zeros ``z`` with ``|d_ph(z, w_i) - r0_k| < h``."""
        r0 = np.asarray(r0_values, dtype=float).reshape(-1)
        key = (tuple(r0), float(h))
        if key in self._rings:
            return self._rings[key]
        outer = float(r0.max() + h)
        if not outer < 1:
            raise DomainError("r0 + h must be < 1")
        n = len(self.zeros)
        out = np.zeros((r0.size, n), dtype=np.int64)
        if n > 1:
            x, y = self.zeros.x, self.zeros.y
            cy, R = _euclid(y, outer)
            lists = self._tree.query_ball_point(np.column_stack([x, cy]), R * (1 + _PAD))
            lens = np.fromiter((len(l) for l in lists), dtype=np.int64, count=n)
            src = np.repeat(np.arange(n), lens)
            dst = np.fromiter((j for l in lists for j in l), dtype=np.int64, count=int(lens.sum()))
            keep = src != dst
            src, dst = src[keep], dst[keep]
            d = ph_distance_xy(x[src], y[src], x[dst], y[dst])
            for k, rk in enumerate(r0):
                hit = np.abs(d - rk) < h
                out[k] = np.bincount(src[hit], minlength=n)
        self._rings[key] = out
        return out

    def sweep(self, times: np.ndarray, v: float, r: float, weights=None) -> np.ndarray:
        """Weighted disk sums for all centres ``(t, v)``, ``t`` in sorted ``times``.

        Returns shape ``(m, len(times))`` for weights of shape ``(m, n_zeros)``
        (plain counts when ``weights`` is None).
        """
        times = np.asarray(times, dtype=float)
        nt = times.size
        if weights is None:
            w_sorted = np.ones((1, len(self.zeros)))
        else:
            w_sorted = np.atleast_2d(np.asarray(weights, dtype=float))[:, self.order]
        cy, R = _euclid(v, r)
        lo = np.searchsorted(self.ys, cy - R, side="right")
        hi = np.searchsorted(self.ys, cy + R, side="left")
        out = np.zeros((w_sorted.shape[0], nt))
        if hi <= lo:
            return out
        dy = self.ys[lo:hi] - cy
        half = np.sqrt(np.maximum(R * R - dy * dy, 0.0))
        xs = self.xs[lo:hi]
        # centre t sees the zero iff |x - t| < half
        a0 = np.searchsorted(times, xs - half, side="right")
        a1 = np.searchsorted(times, xs + half, side="left")
        for i, w in enumerate(w_sorted[:, lo:hi]):
            diff = np.bincount(a0, w, minlength=nt + 1) - np.bincount(a1, w, minlength=nt + 1)
            out[i] = np.cumsum(diff[:nt])
        return out


def _index(zeros) -> ZeroIndex:
    return zeros if isinstance(zeros, ZeroIndex) else ZeroIndex(zeros)


def estimate_local_intensity(zeros, disk: PHDisk) -> float:
    """``|Z cap D| (1 - r^2) / (4 pi r^2 v^2)``."""
    idx = _index(zeros)
    r, v = disk.radius, disk.center.y
    return idx.disk_count(disk.center, r) * (1 - r * r) / (4 * math.pi * r * r * v * v)


def pcf_scale(alpha: float, r0, h: float):
    """Factor turning (ring pair count / centre count) into the pair-correlation estimate."""
    r0 = np.asarray(r0, dtype=float)
    return (1 - r0 * r0) ** 2 / (4 * alpha * h * r0)


@dataclass(frozen=True)
class PCFEstimate:
    center: UHPPoint
    r1: float
    h: float
    r0_values: np.ndarray
    g_hat: np.ndarray
    n_center: int


def check_coverage(center: UHPPoint, reach: float, coverage: Window | None):
    if coverage is None:
        return
    if not float(boundary_distance(center.x, center.y, coverage)) > reach:
        raise ROIViolation(
            f"queries of pseudo-hyperbolic reach {reach:.4f} around ({center.x:g}, {center.y:g}) "
            "leave the region where zeros are known"
        )


def estimate_pcf(
    zeros,
    center: UHPPoint,
    r1: float,
    r0_values,
    h: float,
    alpha: float,
    coverage: Window | None = None,
) -> PCFEstimate:
    """Local pair-correlation estimate on ``D(center, r1)``.

    Rings around each zero of the disk count zeros from the full set; a zero
    never counts itself.  ``coverage`` defaults to the zero set's grid extent.
    """
    idx = _index(zeros)
    r0 = np.asarray(r0_values, dtype=float).reshape(-1)
    if not 0 < h <= r0.min():
        raise DomainError("need 0 < h <= min(r0_values)")
    if coverage is None:
        coverage = idx.zeros.coverage
    check_coverage(center, ph_add(r1, float(r0.max()) + h), coverage)
    members = idx.disk_members(center, r1)
    if members.size == 0:
        raise EmptyDiskError(f"no zeros in the disk of radius {r1} around ({center.x:g}, {center.y:g})")
    sums = idx.ring_counts(r0, h)[:, members].sum(axis=1)
    g_hat = pcf_scale(alpha, r0, h) * sums / members.size
    return PCFEstimate(center, float(r1), float(h), r0, g_hat, int(members.size))


@dataclass(frozen=True)
class ChebyshevResult:
    bound: float
    flags: np.ndarray
    scores: np.ndarray
    counts: np.ndarray


def chebyshev_deviation_test(zeros, disks, deltas, alpha: float) -> ChebyshevResult:
    """Flag pre-registered disks whose count deviates by ``delta_k`` standard deviations.

    Under white noise the probability of any flag is at most ``sum 1 / delta_k^2``.
    """
    disks = list(disks)
    deltas = np.asarray(deltas, dtype=float)
    if len(disks) != deltas.size:
        raise ValueError("disks and deltas must have equal length")
    idx = _index(zeros)
    counts = np.array([idx.disk_count(d.center, d.radius) for d in disks], dtype=float)
    mu = np.array([expected_count(alpha, d.radius) for d in disks])
    sd = np.sqrt([count_variance(alpha, d.radius) for d in disks])
    scores = np.abs(counts - mu) / sd if disks else np.empty(0)
    flags = scores >= deltas
    return ChebyshevResult(float(np.sum(1.0 / deltas**2)), flags, scores, counts)
