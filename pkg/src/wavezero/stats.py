"""Closed-form statistics of the zero set of the hyperbolic GAF.

All functions take the order ``alpha`` and pseudo-hyperbolic radii.  Powers
of ``s = 1 - r^2`` are formed as ``exp(k * log1p(-r^2))`` so that alpha in
the hundreds neither overflows nor loses the small differences that matter.
"""
from __future__ import annotations

import csv
import functools
import math

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, QuadratureError
from .hyperbolic import UHPPoint

# below this alpha * r^2 the pair correlation uses its Taylor series
SERIES_THRESHOLD = 1e-4


def _check_radius(r, name="r"):
    r = np.asarray(r, dtype=float)
    if np.any(~((r > 0) & (r < 1))):
        raise DomainError(f"{name} must lie in (0, 1)")
    return r


def first_intensity(alpha: float, z):
    """Expected zero density ``alpha / (4 pi y^2)`` at ``z`` (a point or its y)."""
    y = np.asarray(z.y if isinstance(z, UHPPoint) else z, dtype=float)
    if np.any(y <= 0):
        raise DomainError("first intensity is defined for y > 0")
    out = alpha / (4 * np.pi * y * y)
    return out if out.ndim else float(out)


def expected_count(alpha: float, r):
    r = _check_radius(r)
    out = alpha * r * r / (1 - r * r)
    return out if out.ndim else float(out)


def variance_integrand(alpha: float, r: float, t):
    """Integrand of the disk-count variance, with its ``t = 0`` limit ``1 / (alpha r^2)``."""
    t = np.abs(np.asarray(t, dtype=float))
    r2 = r * r
    s = 1 - r2
    sin2 = np.sin(0.5 * t) ** 2
    q = s * s + 4 * r2 * sin2  # |1 - r^2 e^{it}|^2
    x = alpha * np.log1p(4 * r2 * sin2 / (s * s))  # log(q^alpha / s^(2 alpha))
    with np.errstate(divide="ignore", invalid="ignore"):
        # 2(1 - cos t) / ((e^x - 1) q) written with e^{-x} to stay finite for large x
        val = 4 * sin2 * np.exp(-x) / (-np.expm1(-x) * q)
    val = np.where(t == 0, 1.0 / (alpha * r2), val)
    return val if val.ndim else float(val)


def count_variance(alpha: float, r: float, quadrature_tol: float = 1e-10) -> float:
    """Variance of the number of zeros in a disk of pseudo-hyperbolic radius ``r``."""
    r = float(_check_radius(r))
    if not alpha > 1:
        raise DomainError("alpha must be > 1")
    val, err, info = quad(
        lambda t: variance_integrand(alpha, r, t), 0.0, math.pi,
        epsabs=0.0, epsrel=quadrature_tol, limit=500, full_output=True,
    )[:3]
    if not np.isfinite(val) or err > quadrature_tol * abs(val):
        raise QuadratureError(
            f"variance quadrature for alpha={alpha}, r={r} did not reach tol {quadrature_tol} "
            f"(estimate {val}, error {err}, {info['neval']} evaluations)"
        )
    s = 1 - r * r
    return alpha**2 * r**4 / (2 * math.pi * s * s) * (2 * val)


def _one_minus_s_pow(k, r2):
    # 1 - (1 - r^2)^k
    return -np.expm1(k * np.log1p(-r2))


def pair_correlation(alpha: float, r):
    """Pair correlation of the zeros at pseudo-hyperbolic distance ``r`` (stable form)."""
    r = _check_radius(r)
    u = r * r
    s = 1 - u
    e = _one_minus_s_pow(alpha, u)
    sa = 1 - e
    with np.errstate(invalid="ignore", divide="ignore"):
        g = (sa * (alpha * u - s * e) ** 2 + (alpha * sa * u - e) ** 2) / e**3
    a = alpha
    series = (
        (a + 1) ** 2 / (2 * a) * u
        - (a + 1) ** 2 / (4 * a) * u**2
        - (a - 1) ** 2 * (a + 1) ** 2 / (36 * a) * u**3
    )
    g = np.where(alpha * u < SERIES_THRESHOLD, series, g)
    return g if g.ndim else float(g)


def pair_correlation_raw(alpha: float, r):
    """Direct polynomial form; cancels badly for small ``r`` or large ``alpha``."""
    r = _check_radius(r)
    s = 1 - r * r
    a = alpha
    num = (
        1
        + (a * a - 2 * a - 2) * (s**a + s ** (2 + 2 * a))
        + (a + 1) ** 2 * (s ** (2 * a) + s ** (2 + a))
        - 2 * a * a * (s ** (1 + a) + s ** (1 + 2 * a))
        + s ** (2 + 3 * a)
    )
    g = num / (1 - s**a) ** 3
    return g if g.ndim else float(g)


def ring_bracket(alpha: float, r):
    """Antiderivative bracket ``[(a+1) s^a (1-s)^2 - (1-s^(a+1))^2] / (s (1-s^a)^2)`` at ``s = 1 - r^2``.

    At ``r = 0`` it takes its limit ``-(alpha + 1) / alpha``.
    """
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r >= 1)):
        raise DomainError("ring radius must lie in [0, 1)")
    u = r * r
    ls = np.log1p(-u)
    with np.errstate(invalid="ignore", divide="ignore"):
        num = (alpha + 1) * np.exp(alpha * ls) * u * u - np.expm1((alpha + 1) * ls) ** 2
        out = num / (np.exp(ls) * np.expm1(alpha * ls) ** 2)
    out = np.where(r == 0, -(alpha + 1) / alpha, out)
    return out if out.ndim else float(out)


def ring_count_expectation(alpha: float, a: float, b: float, r1: float, eps: float = 1e-6) -> float:
    """Expected number of ordered pairs ``(w, z)``, ``w`` in ``D(w1, r1)``, ``d(z, w)`` in ``(a, b)``."""
    if not (0 <= a < b < 1):
        raise DomainError("need 0 <= a < b < 1")
    if b > 1 - eps:
        raise DomainError("outer ring radius too close to 1; the expectation diverges")
    r1 = float(_check_radius(r1, "r1"))
    return r1 * r1 * alpha**2 / (1 - r1 * r1) * float(ring_bracket(alpha, a) - ring_bracket(alpha, b))


def corrected_pcf(alpha: float, r0: float, h: float) -> float:
    """Expectation-matched target for the ring estimator of width ``2h`` at ``r0``."""
    if not (0 < h <= r0) or not r0 + h < 1:
        raise DomainError("need 0 < h <= r0 and r0 + h < 1")
    inner = ring_bracket(alpha, r0 - h) if r0 - h > 0 else -(alpha + 1) / alpha
    outer = ring_bracket(alpha, r0 + h)
    return float((1 - r0 * r0) ** 2 / (4 * h * r0) * (inner - outer))


class ReferenceStats:
    """White-noise reference statistics for a fixed ``alpha``.

    ``sigma2`` serves arbitrary radii from a 256-point log-spaced table with
    monotone cubic interpolation (in log-log); radii that are asked for
    repeatedly (mask radii) can use ``sigma2_exact``.
    """

    TABLE_RANGE = (1e-3, 0.99)
    TABLE_SIZE = 256

    def __init__(self, alpha: float, quadrature_tol: float = 1e-10):
        if not alpha > 1:
            raise DomainError("alpha must be > 1")
        self.alpha = float(alpha)
        self.quadrature_tol = quadrature_tol
        self._interp = None

    def mu(self, r):
        return expected_count(self.alpha, r)

    def g(self, r):
        return pair_correlation(self.alpha, r)

    def g_tilde(self, r0, h):
        return corrected_pcf(self.alpha, r0, h)

    @functools.lru_cache(maxsize=1024)
    def sigma2_exact(self, r: float) -> float:
        return count_variance(self.alpha, float(r), self.quadrature_tol)

    def _table(self):
        if self._interp is None:
            lo, hi = self.TABLE_RANGE
            rs = np.geomspace(lo, hi, self.TABLE_SIZE)
            vals = np.array([count_variance(self.alpha, r, self.quadrature_tol) for r in rs])
            self._interp = PchipInterpolator(np.log(rs), np.log(vals))
        return self._interp

    def sigma2(self, r):
        r = _check_radius(r)
        flat = np.atleast_1d(r).ravel()
        lo, hi = self.TABLE_RANGE
        inside = (flat >= lo) & (flat <= hi)
        out = np.empty_like(flat)
        if np.any(inside):
            out[inside] = np.exp(self._table()(np.log(flat[inside])))
        for i in np.nonzero(~inside)[0]:
            out[i] = self.sigma2_exact(float(flat[i]))
        return out.reshape(r.shape) if r.ndim else float(out[0])

    def table_rows(self, radii, h=None):
        rows = []
        for r in radii:
            row = {"r": float(r), "mu": self.mu(r), "sigma2": self.sigma2_exact(float(r)), "g": self.g(r)}
            if h is not None and h <= r and r + h < 1:
                row["g_tilde"] = self.g_tilde(r, h)
            else:
                row["g_tilde"] = float("nan")
            rows.append(row)
        return rows

    def to_csv(self, path, radii, h=None):
        rows = self.table_rows(radii, h=h)
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["r", "mu", "sigma2", "g", "g_tilde"])
            w.writeheader()
            w.writerows(rows)
        return rows
