"""Masks from deviations of the zero pattern against white-noise statistics.

Two deviation statistics are evaluated at every time-scale point ``w`` of the
region of interest:

* intensity: ``sum_k (|Z cap D(w, r_k)| - mu_k)^2 / (K sigma2_k)``
* pair correlation: ``sum_{k,l} a_kl (g_tilde(r0_k, h) - g_hat_{w, r1_l}(r0_k))^2 / (K0 K1)``
  with ``a_kl = 1 / sigma_hat_kl^2``.  An empty centre disk gives ``g_hat = 0``.

A mask is ``clip(statistic - b, 0, 1)`` (times a gain for the intensity
mask); the combined mask thresholds the sum of both statistics once.
Thresholds and ``sigma_hat`` come from white-noise Monte Carlo (``calibrate``).
"""
from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import CalibrationError, DomainError, EmptyDiskError
from .estimators import ZeroIndex, check_coverage, estimate_pcf, pcf_scale
from .hyperbolic import RegionOfInterest, UHPPoint, observation_window, ph_add
from .pipeline import white_noise_zeros
from .stats import ReferenceStats
from .wavelet import EDGE_FACTOR, GridSpec, Scalogram, TimeScaleGrid, frequency_to_scale, WaveletParams
from .zeros import ZeroSet

log = logging.getLogger(__name__)

# Radius unit for alpha = 300: a disk of radius 15 * RADIUS_UNIT holds 5 zeros on average.
# In these units the default radii are 9..21 (printed to four decimals: 0.0768 ... 0.1793),
# the ring radii 5, 10, 15 and the ring half-width 5.
RADIUS_UNIT = math.sqrt(5 / 305) / 15
DEFAULT_R1 = tuple(k * RADIUS_UNIT for k in (9, 12, 15, 18, 21))
DEFAULT_R0 = tuple(k * RADIUS_UNIT for k in (5, 10, 15))
DEFAULT_H = 5 * RADIUS_UNIT

SCHEMA = "wavezero.calibration"
SCHEMA_VERSION = 1
MASK_KINDS = ("intensity", "pcf", "combined")


@dataclass(frozen=True)
class MaskConfig:
    radii_r: tuple = DEFAULT_R1
    radii_r0: tuple = DEFAULT_R0
    radii_r1: tuple = DEFAULT_R1
    h: float = DEFAULT_H
    a: float = 1.0
    b_intensity: float = 0.0
    b_pcf: float = 0.0
    b_combined: float = 0.0
    a_kl: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("radii_r", "radii_r0", "radii_r1"):
            vals = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, vals)
            if not vals or any(not 0 < v < 1 for v in vals):
                raise DomainError(f"{name} must be a non-empty list of radii in (0, 1)")
        if not 0 < self.h <= min(self.radii_r0):
            raise DomainError("need 0 < h <= min(radii_r0)")
        if not max(self.radii_r0) + self.h < 1:
            raise DomainError("need max(radii_r0) + h < 1")
        if not self.a > 0:
            raise DomainError("gain a must be positive")
        if min(self.b_intensity, self.b_pcf, self.b_combined) < 0:
            raise DomainError("thresholds must be >= 0")
        if self.a_kl is not None:
            akl = np.asarray(self.a_kl, dtype=float)
            if akl.shape != (len(self.radii_r0), len(self.radii_r1)) or np.any(~(akl > 0)):
                raise DomainError("a_kl must be a positive K0 x K1 matrix")
            object.__setattr__(self, "a_kl", akl)

    @property
    def margin(self) -> float:
        """Pseudo-hyperbolic standoff that keeps every disk and ring query inside the data."""
        ring = ph_add(max(self.radii_r1), max(self.radii_r0) + self.h)
        return max(max(self.radii_r), ring)

    def replace(self, **kw) -> "MaskConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return {
            "radii_r": list(self.radii_r),
            "radii_r0": list(self.radii_r0),
            "radii_r1": list(self.radii_r1),
            "h": self.h,
            "a": self.a,
            "b_intensity": self.b_intensity,
            "b_pcf": self.b_pcf,
            "b_combined": self.b_combined,
            "a_kl": None if self.a_kl is None else self.a_kl.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MaskConfig":
        d = dict(d)
        if d.get("a_kl") is not None:
            d["a_kl"] = np.asarray(d["a_kl"], dtype=float)
        return cls(**d)


@dataclass(frozen=True)
class Mask:
    grid: TimeScaleGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.clip(np.nan_to_num(np.asarray(self.values, dtype=float), nan=0.0), 0.0, 1.0)
        if vals.shape != self.grid.shape:
            raise ValueError("mask shape does not match grid")
        object.__setattr__(self, "values", vals)

    def coverage(self, region=None) -> float:
        """Fraction of pixels (of ``region`` if given) where the mask is positive."""
        v = self.values if region is None else self.values[region]
        return float(np.count_nonzero(v > 0)) / max(v.size, 1)


@dataclass(frozen=True)
class CalibrationProfile:
    alpha: float
    config: MaskConfig
    sigma_hat: np.ndarray
    quantile_level: float
    n_seeds: int
    grid: dict
    seed: int | None = None
    noise_kind: str = "real"
    n_samples: int = 0
    edge_factor: float = EDGE_FACTOR
    center_stride: int = 1
    n_centers: int = 0
    g_hat_mean: np.ndarray | None = None

    def __post_init__(self):
        sh = np.asarray(self.sigma_hat, dtype=float)
        if np.any(~(sh > 0)):
            raise CalibrationError("sigma_hat entries must be positive")
        object.__setattr__(self, "sigma_hat", sh)

    def grid_spec(self) -> GridSpec:
        return GridSpec(**self.grid)

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "version": SCHEMA_VERSION,
            "alpha": self.alpha,
            "config": self.config.to_dict(),
            "sigma_hat": self.sigma_hat.tolist(),
            "quantile_level": self.quantile_level,
            "n_seeds": self.n_seeds,
            "grid": self.grid,
            "seed": self.seed,
            "noise_kind": self.noise_kind,
            "n_samples": self.n_samples,
            "edge_factor": self.edge_factor,
            "center_stride": self.center_stride,
            "n_centers": self.n_centers,
            "g_hat_mean": None if self.g_hat_mean is None else np.asarray(self.g_hat_mean).tolist(),
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CalibrationProfile":
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA or doc.get("version") != SCHEMA_VERSION:
            raise ValueError(f"not a {SCHEMA} v{SCHEMA_VERSION} document")
        gm = doc.get("g_hat_mean")
        return cls(
            alpha=doc["alpha"],
            config=MaskConfig.from_dict(doc["config"]),
            sigma_hat=np.asarray(doc["sigma_hat"], dtype=float),
            quantile_level=doc["quantile_level"],
            n_seeds=doc["n_seeds"],
            grid=doc["grid"],
            seed=doc.get("seed"),
            noise_kind=doc.get("noise_kind", "real"),
            n_samples=doc.get("n_samples", 0),
            edge_factor=doc.get("edge_factor", EDGE_FACTOR),
            center_stride=doc.get("center_stride", 1),
            n_centers=doc.get("n_centers", 0),
            g_hat_mean=None if gm is None else np.asarray(gm, dtype=float),
        )

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "CalibrationProfile":
        with open(path) as fh:
            return cls.from_json(fh.read())


# --- per-row evaluation -----------------------------------------------------


@dataclass
class RowEstimates:
    row: int
    cols: np.ndarray
    counts: np.ndarray  # (K, m) zero counts for the intensity radii
    n_center: np.ndarray  # (K1, m) zero counts of the centre disks
    g_hat: np.ndarray  # (K0, K1, m), nan where the centre disk is empty


def iter_row_estimates(index: ZeroIndex, grid: TimeScaleGrid, roi: RegionOfInterest,
                       config: MaskConfig, alpha: float, stride: int = 1):
    """Disk counts and pair-correlation estimates for every ROI grid point, row by row."""
    r0 = np.asarray(config.radii_r0)
    ring = index.ring_counts(r0, config.h).astype(float)
    weights = np.vstack([np.ones((1, ring.shape[1])), ring])
    scale = pcf_scale(alpha, r0, config.h)[:, None]
    r1_pos = {r: l for l, r in enumerate(config.radii_r1)}
    for j, v in enumerate(grid.scales):
        cols = np.nonzero(roi.contains(grid.times, v))[0][::stride]
        if cols.size == 0:
            continue
        t = grid.times[cols]
        n1 = np.empty((len(config.radii_r1), cols.size))
        gh = np.empty((r0.size, len(config.radii_r1), cols.size))
        for l, r1 in enumerate(config.radii_r1):
            S = index.sweep(t, v, r1, weights)
            n1[l] = S[0]
            with np.errstate(invalid="ignore", divide="ignore"):
                gh[:, l] = np.where(S[0] > 0, scale * S[1:] / S[0], np.nan)
        counts = np.empty((len(config.radii_r), cols.size))
        for k, r in enumerate(config.radii_r):
            counts[k] = n1[r1_pos[r]] if r in r1_pos else index.sweep(t, v, r)[0]
        yield RowEstimates(j, cols, counts, n1, gh)


class _Targets:
    def __init__(self, config: MaskConfig, ref: ReferenceStats):
        self.mu = np.array([ref.mu(r) for r in config.radii_r])[:, None]
        self.sigma2 = np.array([ref.sigma2_exact(r) for r in config.radii_r])[:, None]
        self.g_tilde = np.array([ref.g_tilde(r, config.h) for r in config.radii_r0])[:, None, None]
        self.a_kl = None if config.a_kl is None else config.a_kl[:, :, None]

    def intensity(self, counts):
        return np.mean((counts - self.mu) ** 2 / self.sigma2, axis=0)

    def pcf(self, g_hat):
        if self.a_kl is None:
            raise CalibrationError("pair-correlation statistic needs calibrated weights a_kl")
        dev = self.g_tilde - np.nan_to_num(g_hat, nan=0.0)
        return np.mean(self.a_kl * dev * dev, axis=(0, 1))


def statistic_maps(zeros: ZeroSet | ZeroIndex, grid: TimeScaleGrid, roi: RegionOfInterest,
                   config: MaskConfig, ref: ReferenceStats, kinds=("intensity", "pcf")) -> dict:
    """Unthresholded statistics on the grid; NaN outside the region of interest."""
    index = zeros if isinstance(zeros, ZeroIndex) else ZeroIndex(zeros)
    tg = _Targets(config, ref)
    maps = {k: np.full(grid.shape, np.nan) for k in kinds}
    for est in iter_row_estimates(index, grid, roi, config, ref.alpha):
        if "intensity" in maps:
            maps["intensity"][est.row, est.cols] = tg.intensity(est.counts)
        if "pcf" in maps:
            maps["pcf"][est.row, est.cols] = tg.pcf(est.g_hat)
    return maps


# --- single-centre statistics -----------------------------------------------


def intensity_statistic(zeros, w: UHPPoint, radii, ref: ReferenceStats, coverage=None) -> float:
    index = zeros if isinstance(zeros, ZeroIndex) else ZeroIndex(zeros)
    if coverage is None:
        coverage = index.zeros.coverage
    radii = [float(r) for r in radii]
    check_coverage(w, max(radii), coverage)
    dev = [(index.disk_count(w, r) - ref.mu(r)) ** 2 / ref.sigma2_exact(r) for r in radii]
    return float(np.mean(dev))


def pcf_statistic(zeros, w1: UHPPoint, config: MaskConfig, ref: ReferenceStats, coverage=None) -> float:
    index = zeros if isinstance(zeros, ZeroIndex) else ZeroIndex(zeros)
    if config.a_kl is None:
        raise CalibrationError("pair-correlation statistic needs calibrated weights a_kl")
    r0 = np.asarray(config.radii_r0)
    g_hat = np.zeros((r0.size, len(config.radii_r1)))
    for l, r1 in enumerate(config.radii_r1):
        try:
            g_hat[:, l] = estimate_pcf(index, w1, r1, r0, config.h, ref.alpha, coverage).g_hat
        except EmptyDiskError:
            g_hat[:, l] = 0.0
    g_t = np.array([ref.g_tilde(r, config.h) for r in r0])[:, None]
    return float(np.mean(config.a_kl * (g_t - g_hat) ** 2))


# --- masks ------------------------------------------------------------------


def region_of_interest(grid: TimeScaleGrid, config: MaskConfig, edge_factor: float = EDGE_FACTOR) -> RegionOfInterest:
    return RegionOfInterest(observation_window(grid, edge_factor), config.margin)


def check_grid(grid: TimeScaleGrid, profile: CalibrationProfile):
    spec = profile.grid_spec()
    params = WaveletParams.from_alpha(profile.alpha)
    ok = (
        grid.scales.size >= 3
        and math.isclose(grid.log_ratio, math.log(2) / spec.voices_per_octave, rel_tol=1e-9)
        and math.isclose(grid.scales[0], float(frequency_to_scale(params, spec.f_max)), rel_tol=1e-9)
    )
    if ok and grid.times.size > 1:
        ok = math.isclose(grid.times[1] - grid.times[0], spec.time_stride / spec.sample_rate, rel_tol=1e-6)
    if not ok:
        raise CalibrationError(f"grid does not belong to the calibrated family {profile.grid}")


def masks_from_maps(maps: dict, grid: TimeScaleGrid, config: MaskConfig, kinds=MASK_KINDS, dilate: int = 0) -> dict:
    """Clamped masks; ``dilate > 0`` applies a grey dilation of that half-width (off by default)."""
    out = {}
    for kind in kinds:
        if kind == "intensity":
            stat = config.a * maps["intensity"] - config.b_intensity
        elif kind == "pcf":
            stat = maps["pcf"] - config.b_pcf
        elif kind == "combined":
            stat = maps["intensity"] + maps["pcf"] - config.b_combined
        else:
            raise ValueError(f"unknown mask kind {kind!r}")
        vals = np.clip(np.nan_to_num(stat, nan=0.0), 0.0, 1.0)
        if dilate > 0:
            vals = ndimage.grey_dilation(vals, size=(2 * dilate + 1, 2 * dilate + 1))
            vals[np.isnan(stat)] = 0.0
        out[kind] = Mask(grid, vals)
    return out


def build_masks(zeros: ZeroSet, grid: TimeScaleGrid, profile: CalibrationProfile, kinds=MASK_KINDS,
                ref: ReferenceStats | None = None, dilate: int = 0):
    """Masks of several kinds from one pass over the grid; returns ``(masks, maps, roi)``."""
    for kind in kinds:
        if kind not in MASK_KINDS:
            raise ValueError(f"unknown mask kind {kind!r}")
    if zeros.alpha is not None and not math.isclose(zeros.alpha, profile.alpha):
        raise CalibrationError(f"zeros come from alpha={zeros.alpha}, profile is for alpha={profile.alpha}")
    check_grid(grid, profile)
    ref = ref or ReferenceStats(profile.alpha)
    roi = region_of_interest(grid, profile.config, profile.edge_factor)
    need = {"intensity"} if set(kinds) == {"intensity"} else ({"pcf"} if set(kinds) == {"pcf"} else {"intensity", "pcf"})
    maps = statistic_maps(zeros, grid, roi, profile.config, ref, kinds=tuple(sorted(need)))
    return masks_from_maps(maps, grid, profile.config, kinds, dilate), maps, roi


def build_mask(zeros: ZeroSet, grid: TimeScaleGrid, kind: str, profile: CalibrationProfile) -> Mask:
    return build_masks(zeros, grid, profile, (kind,))[0][kind]


def apply_mask(scalogram: Scalogram, mask: Mask, interpolate: bool = False) -> Scalogram:
    """Pointwise product; with ``interpolate`` the mask is resampled by nearest neighbour."""
    g, mg = scalogram.grid, mask.grid
    same = g.shape == mg.shape and np.allclose(g.times, mg.times, rtol=0, atol=1e-12) and np.allclose(g.scales, mg.scales, rtol=1e-12)
    if same:
        vals = mask.values
    elif interpolate:
        ti = _nearest(mg.times, g.times)
        si = _nearest(np.log(mg.scales), np.log(g.scales))
        vals = mask.values[np.ix_(si, ti)]
    else:
        raise ValueError("mask grid differs from scalogram grid; pass interpolate=True to resample")
    return scalogram.with_values(scalogram.values * vals)


def _nearest(src, dst):
    i = np.clip(np.searchsorted(src, dst), 1, src.size - 1) if src.size > 1 else np.zeros(dst.size, int)
    if src.size > 1:
        i = np.where(np.abs(dst - src[i - 1]) <= np.abs(src[i] - dst), i - 1, i)
    return i


# --- calibration ------------------------------------------------------------


def calibrate(
    alpha: float,
    grid_spec: GridSpec,
    n_samples: int,
    config: MaskConfig | None = None,
    n_seeds: int = 20,
    quantile_level: float = 0.999,
    seed: int = 0,
    noise_kind: str = "real",
    center_stride: int = 8,
    edge_factor: float = EDGE_FACTOR,
    min_centers: int = 1000,
) -> CalibrationProfile:
    """White-noise Monte Carlo for ``sigma_hat`` and the three thresholds.

    Statistics are pooled over all seeds and every ``center_stride``-th ROI
    point of each row.  Deterministic given ``seed``.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    config = config or MaskConfig()
    ref = ReferenceStats(alpha)
    tg = _Targets(config, ref)
    children = np.random.SeedSequence(seed).spawn(n_seeds)
    runs = []
    K0, K1 = len(config.radii_r0), len(config.radii_r1)
    s1 = np.zeros((K0, K1))
    s2 = np.zeros((K0, K1))
    cnt = np.zeros((K0, K1))
    intensity = []
    for i, child in enumerate(children):
        zeros, grid = white_noise_zeros(alpha, grid_spec, n_samples, child, noise_kind)
        index = ZeroIndex(zeros)
        try:
            roi = region_of_interest(grid, config, edge_factor)
        except DomainError:
            log.warning("seed %d: signal too short for any region of interest", i + 1)
            continue
        runs.append((index, grid, roi))
        for est in iter_row_estimates(index, grid, roi, config, alpha, center_stride):
            intensity.append(tg.intensity(est.counts).astype(np.float32))
            ok = np.isfinite(est.g_hat)
            g0 = np.where(ok, est.g_hat, 0.0)
            s1 += g0.sum(axis=2)
            s2 += (g0 * g0).sum(axis=2)
            cnt += ok.sum(axis=2)
        log.info("calibration seed %d/%d: %d zeros", i + 1, n_seeds, len(zeros))
    intensity = np.concatenate(intensity) if intensity else np.empty(0)
    if intensity.size < min_centers:
        raise CalibrationError(
            f"only {intensity.size} valid centres pooled (need {min_centers}); "
            "use a longer signal, more seeds, a wider scale range or a smaller center_stride"
        )
    if np.any(cnt < 2):
        raise CalibrationError("some centre radius never had a non-empty disk")
    mean = s1 / cnt
    sigma_hat = np.sqrt(np.maximum(s2 - cnt * mean * mean, 0.0) / (cnt - 1))
    if np.any(sigma_hat <= 0):
        raise CalibrationError("degenerate sigma_hat; too few zeros")
    cfg = config.replace(a_kl=1.0 / sigma_hat**2)
    tg = _Targets(cfg, ref)
    pcf = []
    for index, grid, roi in runs:
        for est in iter_row_estimates(index, grid, roi, cfg, alpha, center_stride):
            pcf.append(tg.pcf(est.g_hat).astype(np.float32))
    pcf = np.concatenate(pcf)
    combined = intensity.astype(float) + pcf
    b = [float(np.quantile(v, quantile_level)) for v in (intensity, pcf, combined)]
    cfg = cfg.replace(b_intensity=b[0], b_pcf=b[1], b_combined=b[2])
    return CalibrationProfile(
        alpha=float(alpha), config=cfg, sigma_hat=sigma_hat, quantile_level=quantile_level,
        n_seeds=n_seeds, grid=grid_spec.descriptor(), seed=seed, noise_kind=noise_kind,
        n_samples=n_samples, edge_factor=edge_factor, center_stride=center_stride,
        n_centers=int(intensity.size), g_hat_mean=mean,
    )
