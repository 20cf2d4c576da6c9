"""White-noise experiments: empirical disk-count and pair-correlation tables, convergence under refinement."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .estimators import ZeroIndex
from .filtering import MaskConfig, iter_row_estimates, region_of_interest
from .hyperbolic import RegionOfInterest
from .pipeline import white_noise_zeros
from .stats import ReferenceStats
from .wavelet import (
    EDGE_FACTOR, GridSpec, SignalBuffer, TimeScaleGrid, WaveletParams, forward_cwt,
    frequency_to_scale, generate_white_noise, refine_noise,
)


@dataclass
class TableResult:
    alpha: float
    config: MaskConfig
    n_seeds: int
    n_centers: int
    count_mean: np.ndarray  # (K,)
    count_var: np.ndarray  # (K,)
    g_mean: np.ndarray  # (K0, K1)
    g_sd: np.ndarray  # (K0, K1)
    n_valid: np.ndarray  # (K0, K1) centres with a non-empty disk
    closed_form: dict = field(default_factory=dict)

    def rows(self):
        cf = self.closed_form
        out = []
        for k, r in enumerate(self.config.radii_r):
            out.append({
                "table": 1, "r0": "", "r": r, "empirical_mean": self.count_mean[k],
                "empirical_spread": self.count_var[k], "closed_mean": cf["mu"][k], "closed_spread": cf["sigma2"][k],
                "closed_g": "", "n": self.n_centers,
            })
        for tbl, spread in ((2, None), (3, self.g_sd)):
            for k, r0 in enumerate(self.config.radii_r0):
                for l, r1 in enumerate(self.config.radii_r1):
                    out.append({
                        "table": tbl, "r0": r0, "r": r1,
                        "empirical_mean": self.g_mean[k, l] if tbl == 2 else "",
                        "empirical_spread": "" if spread is None else spread[k, l],
                        "closed_mean": cf["g_tilde"][k] if tbl == 2 else "",
                        "closed_spread": "", "closed_g": cf["g"][k] if tbl == 2 else "",
                        "n": int(self.n_valid[k, l]),
                    })
        return out

    def to_csv(self, path):
        fields = ["table", "r0", "r", "empirical_mean", "empirical_spread", "closed_mean", "closed_spread", "closed_g", "n"]
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields)
            w.writeheader()
            w.writerows(self.rows())


def white_noise_tables(
    alpha: float = 300.0,
    n_seeds: int = 5,
    seed: int = 0,
    grid_spec: GridSpec | None = None,
    n_samples: int = 88200,
    config: MaskConfig | None = None,
    center_stride: int = 4,
    noise_kind: str = "real",
    edge_factor: float = EDGE_FACTOR,
) -> TableResult:
    """Disk-count moments (radii ``r``) and pair-correlation estimates (``r0`` x ``r1``).

    Centres are every ``center_stride``-th ROI grid point of each scale row,
    pooled over ``n_seeds`` independent realisations.  Pair-correlation moments
    use only centres whose disk is non-empty.
    """
    grid_spec = grid_spec or GridSpec()
    config = config or MaskConfig()
    ref = ReferenceStats(alpha)
    K, K0, K1 = len(config.radii_r), len(config.radii_r0), len(config.radii_r1)
    c1, c2 = np.zeros(K), np.zeros(K)
    g1, g2, gn = np.zeros((K0, K1)), np.zeros((K0, K1)), np.zeros((K0, K1))
    n = 0
    for child in np.random.SeedSequence(seed).spawn(n_seeds):
        zeros, grid = white_noise_zeros(alpha, grid_spec, n_samples, child, noise_kind)
        index = ZeroIndex(zeros)
        roi = region_of_interest(grid, config, edge_factor)
        for est in iter_row_estimates(index, grid, roi, config, alpha, center_stride):
            c1 += est.counts.sum(axis=1)
            c2 += (est.counts**2).sum(axis=1)
            n += est.cols.size
            ok = np.isfinite(est.g_hat)
            g = np.where(ok, est.g_hat, 0.0)
            g1 += g.sum(axis=2)
            g2 += (g * g).sum(axis=2)
            gn += ok.sum(axis=2)
    if n < 2:
        raise ValueError("no valid centres; the signal is too short for the chosen radii")
    cm = c1 / n
    cv = (c2 - n * cm * cm) / (n - 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        gm = g1 / gn
        gs = np.sqrt(np.maximum(g2 - gn * gm * gm, 0.0) / (gn - 1))
    closed = {
        "mu": [ref.mu(r) for r in config.radii_r],
        "sigma2": [ref.sigma2_exact(r) for r in config.radii_r],
        "g": [ref.g(r) for r in config.radii_r0],
        "g_tilde": [ref.g_tilde(r, config.h) for r in config.radii_r0],
    }
    return TableResult(alpha, config, n_seeds, n, cm, cv, gm, gs, gn, closed)


def expected_roi_count(alpha: float, roi: RegionOfInterest) -> float:
    """Integral of the first intensity ``alpha / (4 pi y^2)`` over the region of interest."""
    w, m = roi.window, roi.margin
    c = 2 * m / (1 - m * m)
    # a ball at height v spans [v (1-m)/(1+m), v (1+m)/(1-m)] in y and v c to either side in x
    va = w.y_min * (1 + m) / (1 - m)
    vb = w.y_max * (1 - m) / (1 + m)
    vb = min(vb, (w.t_max - w.t_min) / (2 * c)) if c > 0 else vb
    if vb <= va:
        return 0.0
    span = w.t_max - w.t_min
    return alpha / (4 * math.pi) * (span * (1 / va - 1 / vb) - 2 * c * math.log(vb / va))


# --- convergence under dyadic refinement --------------------------------------


@dataclass
class ConvergenceResult:
    sample_rates: list
    sup_diff: np.ndarray  # (n_seeds, n_levels - 1): level i vs level i + 1 (finer)
    grid: TimeScaleGrid

    @property
    def mean(self) -> np.ndarray:
        return self.sup_diff.mean(axis=0)

    def decreasing(self) -> bool:
        m = self.mean
        return bool(np.all(np.diff(m) < 0))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["coarse_rate_hz", "fine_rate_hz", "mean_sup_diff", "sd_sup_diff", "n_seeds"])
            for i, m in enumerate(self.mean):
                sd = self.sup_diff[:, i].std(ddof=1) if self.sup_diff.shape[0] > 1 else 0.0
                w.writerow([self.sample_rates[i], self.sample_rates[i + 1], m, sd, self.sup_diff.shape[0]])


def convergence_check(
    alpha: float = 300.0,
    n_levels: int = 4,
    n_seeds: int = 20,
    seed: int = 0,
    coarse_rate: float = 8000.0,
    duration: float = 0.25,
    f_range: tuple = (500.0, 2000.0),
    voices_per_octave: int = 8,
    n_times: int = 200,
    zero_signal: bool = False,
) -> ConvergenceResult:
    """Sup-differences of the transform of one noise realised at dyadic resolutions.

    The finest noise is drawn once; each coarser version sums adjacent pairs,
    which is the same Brownian increment at half the resolution.  All levels
    are compared on one compact grid of coarse sample instants and scales.
    """
    if n_levels < 2:
        raise ValueError("need at least two levels")
    params = WaveletParams.from_alpha(alpha)
    fine_rate = coarse_rate * 2 ** (n_levels - 1)
    n_fine = int(round(duration * fine_rate))
    n_fine -= n_fine % 2 ** (n_levels - 1)
    scales = np.geomspace(frequency_to_scale(params, f_range[1]), frequency_to_scale(params, f_range[0]),
                          max(2, int(round(math.log2(f_range[1] / f_range[0]) * voices_per_octave)) + 1))
    rates = [coarse_rate * 2**i for i in range(n_levels)]
    out = np.zeros((n_seeds, n_levels - 1))
    grid = None
    for s, child in enumerate(np.random.SeedSequence(seed).spawn(n_seeds)):
        noise = generate_white_noise(n_fine, 1.0 / fine_rate, "real", child)
        if zero_signal:
            noise = SignalBuffer(np.zeros(n_fine), noise.sample_interval)
        levels = [noise]
        for _ in range(n_levels - 1):
            levels.append(refine_noise(levels[-1]))
        levels = levels[::-1]  # coarse to fine
        if grid is None:
            coarse = levels[0]
            margin = 2 * params.support_halfwidth() * scales[-1]
            inside = coarse.times[(coarse.times > coarse.times[0] + margin) & (coarse.times < coarse.times[-1] - margin)]
            step = max(1, inside.size // n_times)
            grid = TimeScaleGrid(inside[::step], scales)
        W = [forward_cwt(sig, params, grid).values for sig in levels]
        out[s] = [np.max(np.abs(W[i + 1] - W[i])) for i in range(n_levels - 1)]
    return ConvergenceResult(rates, out, grid)
