from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavezero.errors import DomainError
from wavezero.hyperbolic import (
    PHDisk, RegionOfInterest, UHPPoint, Window, boundary_distance, hyperbolic_area, observation_window,
    ph_add, ph_ball_contains, ph_distance, ph_distance_xy, roi_filter,
)
from wavezero.wavelet import TimeScaleGrid
from wavezero.zeros import ZeroSet

# moderate magnitudes: the shifted coordinates must be exactly representable to ~1e-16
coord = st.floats(-10, 10, allow_nan=False)
height = st.floats(1e-2, 10)


def test_distance_examples():
    assert ph_distance(UHPPoint(0, 1), UHPPoint(0, 1)) == 0
    assert ph_distance(UHPPoint(0, 1), UHPPoint(0, 2)) == pytest.approx(1 / 3, abs=1e-15)
    with pytest.raises(DomainError):
        UHPPoint(0, 0)


@settings(max_examples=200)
@given(coord, height, coord, height, coord, st.floats(1e-2, 1e2))
def test_distance_invariances(x1, y1, x2, y2, shift, c):
    d = ph_distance(UHPPoint(x1, y1), UHPPoint(x2, y2))
    assert 0 <= d < 1 or d == pytest.approx(1.0)
    assert d == pytest.approx(ph_distance(UHPPoint(x2, y2), UHPPoint(x1, y1)), abs=1e-12)
    assert d == pytest.approx(ph_distance(UHPPoint(x1 + shift, y1), UHPPoint(x2 + shift, y2)), abs=1e-12)
    assert d == pytest.approx(ph_distance(UHPPoint(c * x1, c * y1), UHPPoint(c * x2, c * y2)), abs=1e-12)


def test_distance_triangle_with_ph_add():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (3, 2000))
    y = rng.uniform(0.1, 2, (3, 2000))
    dab = ph_distance_xy(x[0], y[0], x[1], y[1])
    dbc = ph_distance_xy(x[1], y[1], x[2], y[2])
    dac = ph_distance_xy(x[0], y[0], x[2], y[2])
    assert np.all(dac <= ph_add(dab, dbc) + 1e-12)


def test_ball_open_and_center():
    c = UHPPoint(0, 1)
    disk = PHDisk(c, 0.5)
    assert ph_ball_contains(disk, c)
    # d_ph(i, 3i) = 2/4 = 0.5 exactly: on the boundary, hence outside
    assert not ph_ball_contains(disk, UHPPoint(0, 3))
    with pytest.raises(DomainError):
        PHDisk(c, 1.0)


def test_ball_is_euclidean_disk():
    rng = np.random.default_rng(1)
    disk = PHDisk(UHPPoint(0.3, 0.7), 0.4)
    cx, cy = disk.euclidean_center
    R = disk.euclidean_radius
    x = rng.uniform(-2, 2, 10**4)
    y = rng.uniform(0.01, 3, 10**4)
    ph = ph_distance_xy(x, y, 0.3, 0.7) < 0.4
    eu = (x - cx) ** 2 + (y - cy) ** 2 < R * R
    assert np.array_equal(ph, eu)
    brute = np.array([ph_ball_contains(disk, UHPPoint(a, b)) for a, b in zip(x[:2000], y[:2000])])
    assert np.array_equal(brute, ph[:2000])
    x0, x1, y0, y1 = disk.bbox()
    assert np.all((x[ph] >= x0) & (x[ph] <= x1) & (y[ph] >= y0) & (y[ph] <= y1))


def test_hyperbolic_area():
    # 0.128^2 / (1 - 0.128^2) = 0.0166569...; agrees with the reference value 0.016659 to five decimals
    assert hyperbolic_area(PHDisk(UHPPoint(0, 1), 0.128)) == pytest.approx(0.128**2 / (1 - 0.128**2), rel=1e-15)
    assert hyperbolic_area(PHDisk(UHPPoint(0, 1), 0.128)) == pytest.approx(0.016659, abs=5e-6)
    assert 300 * hyperbolic_area(PHDisk(UHPPoint(5, 0.2), 0.128)) == pytest.approx(5.0, abs=5e-3)
    assert hyperbolic_area(PHDisk(UHPPoint(0, 1), 1e-8)) < 1e-15


def test_area_monte_carlo():
    # int_D alpha / (4 pi y^2) over a disk by uniform sampling of its bounding box
    rng = np.random.default_rng(2)
    alpha, r = 300.0, 0.3
    disk = PHDisk(UHPPoint(1.0, 0.4), r)
    x0, x1, y0, y1 = disk.bbox()
    n = 10**6
    x = rng.uniform(x0, x1, n)
    y = rng.uniform(y0, y1, n)
    inside = ph_distance_xy(x, y, 1.0, 0.4) < r
    est = (x1 - x0) * (y1 - y0) * np.mean(inside * alpha / (4 * math.pi * y * y))
    assert est == pytest.approx(alpha * hyperbolic_area(disk), rel=5e-3)


def dense_boundary_distance(x, y, w: Window, n=10**4):
    """Minimum over sampled boundary points, then resampled around the best sample of each side."""
    segs = [((w.t_min, w.y_min), (w.t_max, w.y_min)), ((w.t_min, w.y_max), (w.t_max, w.y_max)),
            ((w.t_min, w.y_min), (w.t_min, w.y_max)), ((w.t_max, w.y_min), (w.t_max, w.y_max))]
    out = np.full(np.size(x), np.inf)
    for (ax, ay), (bx, by) in segs:
        s = np.linspace(0, 1, n)
        for i, (px, py) in enumerate(zip(x, y)):
            d = ph_distance_xy(px, py, ax + s * (bx - ax), ay + s * (by - ay))
            k = np.argmin(d)
            fine = np.linspace(s[max(k - 1, 0)], s[min(k + 1, n - 1)], n)
            d2 = ph_distance_xy(px, py, ax + fine * (bx - ax), ay + fine * (by - ay)).min()
            out[i] = min(out[i], d.min(), d2)
    return out


def test_boundary_distance_matches_dense_sampling():
    rng = np.random.default_rng(3)
    w = Window(0.0, 2.0, 0.01, 0.3)
    x = rng.uniform(0, 2, 400)
    y = np.exp(rng.uniform(np.log(0.01), np.log(0.3), 400))
    exact = boundary_distance(x, y, w)
    dense = dense_boundary_distance(x, y, w)
    assert np.all(exact <= dense + 1e-12)
    assert np.max(dense - exact) < 1e-6
    assert np.all(boundary_distance(np.array([-1.0, 1.0]), np.array([0.1, 0.5]), w) == 0)


def test_roi_decision_agrees_with_dense_oracle():
    rng = np.random.default_rng(4)
    w = Window(0.0, 1.0, 0.002, 0.05)
    roi = RegionOfInterest(w, 0.34)
    x = rng.uniform(0, 1, 3000)
    y = np.exp(rng.uniform(np.log(0.002), np.log(0.05), 3000))
    fast = roi.contains(x, y)
    d = boundary_distance(x, y, w)
    assert np.array_equal(fast, d > 0.34)
    # against the sampled oracle, disagreements only within a hair of the margin
    sub = slice(0, 300)
    dense = dense_boundary_distance(x[sub], y[sub], w)
    disagree = fast[sub] != (dense > 0.34)
    assert np.all(np.abs(dense[disagree] - 0.34) < 1e-6)


def test_roi_margin_zero_and_center():
    w = Window(0.0, 10.0, 0.01, 1.0)
    roi0 = RegionOfInterest(w, 0.0)
    pts = [UHPPoint(5.0, 0.1), UHPPoint(1.0, 0.5)]
    assert roi_filter(pts, roi0) == pts
    assert roi_filter([UHPPoint(5.0, 0.1)], RegionOfInterest(w, 0.05)) == [UHPPoint(5.0, 0.1)]
    assert roi_filter([], roi0) == []
    with pytest.raises(DomainError):
        RegionOfInterest(w, 1.0)


def test_roi_filter_zeroset_and_grid():
    grid = TimeScaleGrid(np.linspace(0, 1, 101), 0.01 * 2.0 ** (np.arange(30) / 8))
    w = observation_window(grid, edge_factor=1.0)
    roi = RegionOfInterest(w, 0.2)
    mask = roi_filter(grid, roi)
    assert mask.shape == grid.shape and mask.any() and not mask.all()
    z = ZeroSet(np.array([0.5, 0.01]), np.array([0.03, 0.03]), grid)
    kept = roi_filter(z, roi)
    assert isinstance(kept, ZeroSet) and len(kept) == 1 and kept.x[0] == 0.5


def test_observation_window():
    grid = TimeScaleGrid(np.linspace(0, 1, 101), 0.01 * 2.0 ** (np.arange(9) / 8))
    w = observation_window(grid, 6.0)
    assert w.t_min == pytest.approx(6 * grid.scales[-1])
    assert w.y_min == pytest.approx(grid.scale_edges[0])
