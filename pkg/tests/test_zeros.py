from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from wavezero.experiments import expected_roi_count
from wavezero.hyperbolic import RegionOfInterest, Window, observation_window
from wavezero.stats import count_variance
from wavezero.wavelet import Scalogram, TimeScaleGrid, WaveletParams
from wavezero.zeros import ZeroSet, extract_zeros, local_minima, zero_density_map

P = WaveletParams.from_alpha(20.0)


def scalogram_of(mod):
    mod = np.asarray(mod, dtype=float)
    grid = TimeScaleGrid(np.arange(mod.shape[1], dtype=float), 2.0 ** (np.arange(mod.shape[0]) / 4))
    return Scalogram(grid, mod.astype(complex), P)


def brute_minima(mod):
    out = []
    for i in range(1, mod.shape[0] - 1):
        for j in range(1, mod.shape[1] - 1):
            c = mod[i, j]
            if c < mod[i - 1, j] and c < mod[i + 1, j] and c < mod[i, j - 1] and c < mod[i, j + 1]:
                out.append((i, j))
    return out


def test_single_minimum():
    mod = np.ones((5, 6))
    mod[2, 3] = 0.1
    z = extract_zeros(scalogram_of(mod))
    assert len(z) == 1 and z.rows[0] == 2 and z.cols[0] == 3
    assert z.x[0] == 3.0 and z.y[0] == 2.0 ** 0.5


def test_constant_and_plateau_give_nothing():
    assert len(extract_zeros(scalogram_of(np.ones((6, 6))))) == 0
    mod = np.ones((6, 7))
    mod[2:4, 2:4] = 0.0  # flat valley: no strict minimum
    assert len(extract_zeros(scalogram_of(mod))) == 0


def test_border_never_reported():
    mod = np.ones((5, 5))
    mod[0, 2] = mod[2, 0] = mod[4, 4] = 0.0
    assert len(extract_zeros(scalogram_of(mod))) == 0


def test_rejects_small_grid():
    with pytest.raises(ValueError):
        extract_zeros(scalogram_of(np.ones((2, 5))))
    with pytest.raises(ValueError):
        local_minima(np.ones((3, 3)), "six")


def test_eight_neighbourhood_is_subset():
    mod = np.random.default_rng(0).random((40, 50))
    four = local_minima(mod, "four")
    eight = local_minima(mod, "eight")
    assert np.all(four[eight]) and eight.sum() <= four.sum()


@settings(max_examples=60, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(3, 12)), elements=st.floats(0, 10)))
def test_matches_brute_force(mod):
    z = extract_zeros(scalogram_of(mod))
    assert sorted(zip(z.rows.tolist(), z.cols.tolist())) == brute_minima(mod)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(1e-6, 1e6))
def test_global_rescaling_invariance(seed, c):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((10, 15)) + 1j * rng.standard_normal((10, 15))
    s = scalogram_of(np.ones((10, 15))).with_values(vals)
    a = extract_zeros(s)
    b = extract_zeros(s.with_values(vals * c))
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def test_refinement_stays_within_half_cell():
    rng = np.random.default_rng(1)
    s = scalogram_of(rng.random((20, 30)))
    base = extract_zeros(s)
    ref = extract_zeros(s, refine=True)
    assert len(base) == len(ref)
    assert np.all(np.abs(ref.x - base.x) <= 0.5 + 1e-12)
    ratio = np.log(ref.y / base.y) / s.grid.log_ratio
    assert np.all(np.abs(ratio) <= 0.5 + 1e-12)


def test_parabola_vertex_recovered():
    # samples of a paraboloid with vertex at (+0.25 col, -0.2 row)
    r, c = np.mgrid[0:5, 0:5].astype(float)
    mod = (c - 2.25) ** 2 + (r - 1.8) ** 2 + 1.0
    s = scalogram_of(mod)
    z = extract_zeros(s, refine=True)
    assert z.x[0] == pytest.approx(2.25)
    assert np.log(z.y[0]) / s.grid.log_ratio == pytest.approx(1.8)


def test_white_noise_zeros_verify_and_match_intensity(noise_analysis):
    a = noise_analysis
    mod = a.scalogram.modulus
    z = a.zeros
    r, c = z.rows, z.cols
    assert np.all((mod[r, c] < mod[r - 1, c]) & (mod[r, c] < mod[r + 1, c])
                  & (mod[r, c] < mod[r, c - 1]) & (mod[r, c] < mod[r, c + 1]))
    assert len(set(zip(z.x.tolist(), z.y.tolist()))) == len(z)
    roi = RegionOfInterest(observation_window(a.grid), 0.0)
    count = int(np.count_nonzero(roi.contains(z.x, z.y)))
    mean = expected_roi_count(300.0, roi)
    # the count in a region is sub-Poissonian; sqrt(mean) bounds its spread from above
    assert abs(count - mean) < 3 * np.sqrt(mean)


def test_disk_count_spread_is_sub_poissonian():
    # rigidity used above: variance per disk well below the mean
    assert count_variance(300.0, 0.128) < 0.2 * 5.0


def test_zero_density_map():
    rng = np.random.default_rng(2)
    z = ZeroSet(rng.uniform(0, 1, 300), rng.uniform(0.1, 1, 300))
    w = Window(0.2, 0.7, 0.3, 0.8)
    brute = sum(1 for a, b in zip(z.x, z.y) if 0.2 <= a <= 0.7 and 0.3 <= b <= 0.8)
    assert zero_density_map(z, w) == brute
    assert zero_density_map(ZeroSet(np.empty(0), np.empty(0)), w) == 0
    assert zero_density_map(z, Window(-1, 2, 0.01, 2)) == len(z)


def test_zeroset_validation_and_scaling():
    with pytest.raises(ValueError):
        ZeroSet([0.0], [-1.0])
    z = ZeroSet([1.0, 2.0], [0.5, 0.25], alpha=300.0)
    s = z.scaled(2.0)
    assert np.array_equal(s.x, [2.0, 4.0]) and s.alpha == 300.0
    assert [p.y for p in z.points] == [0.5, 0.25]
    assert len(z.subset(np.array([True, False]))) == 1
