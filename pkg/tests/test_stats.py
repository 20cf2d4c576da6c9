from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, simpson

from wavezero.errors import DomainError, QuadratureError
from wavezero.filtering import DEFAULT_H, DEFAULT_R0, DEFAULT_R1
from wavezero.hyperbolic import UHPPoint
from wavezero.stats import (
    ReferenceStats, corrected_pcf, count_variance, expected_count, first_intensity, pair_correlation,
    pair_correlation_raw, ring_bracket, ring_count_expectation, variance_integrand,
)


def test_first_intensity():
    assert first_intensity(300, UHPPoint(0, 1)) == pytest.approx(23.8732, abs=1e-4)
    assert first_intensity(300, 2.0) == pytest.approx(first_intensity(300, 1.0) / 4)
    with pytest.raises(DomainError):
        first_intensity(300, 0.0)


def test_expected_count_values():
    assert expected_count(300, 0.1280) == pytest.approx(5.0, abs=5e-3)
    # printed four-decimal radius: agreement to 3 significant figures (1.7800 vs 1.781)
    assert float(f"{expected_count(300, 0.0768):.3g}") == float(f"{1.781:.3g}")
    # the radius behind the printed value reproduces all three decimals
    assert round(expected_count(300, DEFAULT_R1[0]), 3) == 1.781
    assert expected_count(300, 1e-9) < 1e-12
    with pytest.raises(DomainError):
        expected_count(300, 1.0)


def test_disk_count_is_area_integral():
    # int over the disk of alpha/(4 pi y^2) in pseudo-hyperbolic polar coordinates
    alpha, r = 300.0, 0.2
    val = quad(lambda d: alpha * 2 * d / (1 - d * d) ** 2, 0, r)[0]
    assert val == pytest.approx(expected_count(alpha, r), rel=1e-12)


def simpson_variance(alpha, r, n=200001):
    """Independent oracle: plain formula with mpmath-free log-domain powers on a Simpson grid."""
    t = np.linspace(-math.pi, math.pi, n)
    s = 1 - r * r
    log_q = np.log(np.abs(1 - r * r * np.exp(1j * t)) ** 2)
    # (|.|^{2 alpha} - s^{2 alpha}) / s^{2 alpha} = exp(alpha (log q - 2 log s)) - 1
    gap = np.expm1(alpha * (log_q - 2 * math.log(s)))
    with np.errstate(invalid="ignore", divide="ignore"):
        f = 2 * (1 - np.cos(t)) / (gap * np.exp(log_q))
    f[np.abs(t) < 1e-300] = 1 / (alpha * r * r)
    f[n // 2] = 1 / (alpha * r * r)
    return alpha**2 * r**4 / (2 * math.pi * s * s) * simpson(f, x=t)


@pytest.mark.parametrize("r,expected", [(0.0768, 0.531), (0.1024, 0.684), (0.1280, 0.849),
                                        (0.1536, 1.019), (0.1793, 1.194)])
def test_count_variance_table(r, expected):
    assert count_variance(300, r, 1e-6) == pytest.approx(expected, abs=2e-3)


def test_count_variance_matches_simpson_oracle():
    for alpha, r in [(300, 0.128), (5, 0.5), (20, 0.3), (2, 0.8)]:
        assert count_variance(alpha, r) == pytest.approx(simpson_variance(alpha, r), rel=1e-7)


def test_variance_integrand_limit():
    for alpha, r in [(300, 0.128), (5, 0.4)]:
        lim = 1 / (alpha * r * r)
        assert variance_integrand(alpha, r, 0.0) == pytest.approx(lim, rel=1e-15)
        assert variance_integrand(alpha, r, 1e-4) == pytest.approx(lim, rel=1e-4)


def test_count_variance_sub_poissonian():
    for r in DEFAULT_R1:
        assert count_variance(300, r) / expected_count(300, r) < 1


def test_count_variance_reports_failure(monkeypatch):
    import wavezero.stats as stats_mod

    # an integrator that comes back with a large error estimate
    monkeypatch.setattr(stats_mod, "quad", lambda *a, **k: (1.0, 0.5, {"neval": 21}, "roundoff"))
    with pytest.raises(QuadratureError):
        stats_mod.count_variance(300, 0.128, quadrature_tol=1e-6)
    monkeypatch.undo()
    with pytest.raises(DomainError):
        count_variance(1.0, 0.1)


@pytest.mark.parametrize("r,expected", [(0.0427, 0.270), (0.0854, 0.863), (0.1280, 1.050)])
def test_pair_correlation_table(r, expected):
    # printed radii: within one unit of the third decimal; exact radii: all three decimals
    assert pair_correlation(300, r) == pytest.approx(expected, abs=1e-3)
    exact = DEFAULT_R0[[0.0427, 0.0854, 0.1280].index(r)]
    assert round(pair_correlation(300, exact), 3) == expected


@settings(max_examples=300)
@given(st.floats(0.2, 0.8), st.sampled_from([2.0, 5.0, 20.0]))
def test_stable_form_matches_raw(r, alpha):
    assert pair_correlation(alpha, r) == pytest.approx(pair_correlation_raw(alpha, r), rel=1e-8)


def test_pair_correlation_limits():
    assert pair_correlation(300, 0.9999) == pytest.approx(1.0, abs=1e-3)
    assert pair_correlation(300, 0.999) == pytest.approx(1.0, abs=1e-3)
    r = np.linspace(0.001, 0.05, 200)
    g = pair_correlation(300, r)
    assert np.all(np.diff(g) > 0)
    assert np.all(g < 1)


def test_pair_correlation_small_r():
    # leading behaviour (alpha+1)^2 r^2 / (2 alpha); at alpha = 300, r = 0.01 this is ~0.0151
    g = pair_correlation(300, 0.01)
    assert g == pytest.approx(301**2 / 600 * 1e-4, rel=1e-2)
    assert g < 0.02
    # series and closed form agree across the switch-over
    a = 300.0
    u_sw = 1e-4 / a
    lo, hi = math.sqrt(u_sw) * (1 - 1e-6), math.sqrt(u_sw) * (1 + 1e-6)
    assert pair_correlation(a, lo) == pytest.approx(pair_correlation(a, hi), rel=1e-5)


def test_pair_correlation_domain():
    with pytest.raises(DomainError):
        pair_correlation(300, 0.0)


@pytest.mark.parametrize("r0,expected", [(0.0427, 0.489), (0.0854, 0.861), (0.1280, 1.022)])
def test_corrected_pcf_table(r0, expected):
    assert corrected_pcf(300, r0, 0.0427) == pytest.approx(expected, abs=1e-3)


def test_corrected_pcf_exact_radii_both_branches():
    h = DEFAULT_H
    got = [corrected_pcf(300, r0, h) for r0 in DEFAULT_R0]
    assert [round(v, 3) for v in got] == [0.489, 0.861, 1.022]
    # r0 = h hits the r0 - h = 0 branch exactly
    assert DEFAULT_R0[0] - h == 0


def test_corrected_pcf_is_ring_average():
    a = 300.0
    for r0, h in [(0.0854, 0.0427), (0.2, 0.05), (0.0427, 0.0427)]:
        num = quad(lambda d: pair_correlation(a, d) * 2 * d / (1 - d * d) ** 2, max(r0 - h, 1e-12), r0 + h,
                   epsabs=0, epsrel=1e-12)[0]
        assert corrected_pcf(a, r0, h) == pytest.approx(num * (1 - r0 * r0) ** 2 / (4 * h * r0), rel=1e-9)


def test_corrected_pcf_small_h_limit():
    assert corrected_pcf(300, 0.1280, 1e-5) == pytest.approx(pair_correlation(300, 0.1280), abs=1e-3)
    with pytest.raises(DomainError):
        corrected_pcf(300, 0.05, 0.06)


def test_ring_bracket_limit():
    assert ring_bracket(300, 0.0) == pytest.approx(-301 / 300)
    assert ring_bracket(300, 1e-4) == pytest.approx(-301 / 300, rel=1e-3)


def test_ring_count_expectation_quadrature():
    a = 300.0
    for lo, hi, r1 in [(0.0, 0.0854, 0.128), (0.04, 0.12, 0.0768), (0.1, 0.3, 0.2)]:
        num = quad(lambda d: 2 * d * pair_correlation(a, d) * a / (1 - d * d) ** 2, max(lo, 1e-12), hi,
                   epsabs=0, epsrel=1e-12)[0]
        assert ring_count_expectation(a, lo, hi, r1) == pytest.approx(expected_count(a, r1) * num, rel=1e-6)


def test_ring_count_expectation_domain():
    with pytest.raises(DomainError):
        ring_count_expectation(300, 0.0, 1 - 1e-9, 0.1)
    with pytest.raises(DomainError):
        ring_count_expectation(300, 0.2, 0.1, 0.1)


def test_reference_stats_interpolation():
    ref = ReferenceStats(300)
    rs = np.array([0.002, 0.05, 0.0768, 0.128, 0.3, 0.7])
    exact = np.array([count_variance(300, r) for r in rs])
    assert np.allclose(ref.sigma2(rs), exact, rtol=1e-4)
    assert ref.sigma2(0.128) == pytest.approx(exact[3], rel=1e-4)
    assert ref.sigma2(0.995) > 0
    assert ref.mu(0.128) == expected_count(300, 0.128)


def test_reference_table_csv(tmp_path):
    ref = ReferenceStats(300)
    rows = ref.to_csv(tmp_path / "ref.csv", DEFAULT_R1, h=DEFAULT_H)
    text = (tmp_path / "ref.csv").read_text().splitlines()
    assert text[0] == "r,mu,sigma2,g,g_tilde"
    assert len(text) == 6
    assert [round(r["mu"], 3) for r in rows] == [1.781, 3.181, 5.0, 7.253, 9.959]
