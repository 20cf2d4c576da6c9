"""Cauchy wavelets and the discretised continuous wavelet transform.

Fourier convention: ``s_hat(xi) = int s(t) exp(-i xi t) dt`` with angular
frequency ``xi``.  The mother wavelet has spectrum ``xi**((alpha-1)/2) *
exp(-xi)`` on ``xi >= 0`` and is used L2-normalised, so white noise of
variance ``T_s`` per sample gives unit per-pixel variance at every scale.

A sample ``s[l]`` is attached to time ``origin_time + l * T_s``, the right end
of the cell it integrates over.  The transform is the plain sum
``W(x, y) = sum_l s[l] * conj(psi((t_l - x) / y)) / sqrt(y)`` evaluated with
FFTs (circular boundary).  Each scale row is contaminated within roughly
``EDGE_FACTOR * y`` of both ends of the signal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy.special import gammaln

EDGE_FACTOR = 6.0
# relative modulus below which the time-domain wavelet counts as outside its support
SUPPORT_EPS = 1e-6


@dataclass(frozen=True)
class WaveletParams:
    alpha: float
    log_l2_norm: float
    admissibility: float
    peak_xi: float

    @classmethod
    def from_alpha(cls, alpha: float) -> "WaveletParams":
        alpha = float(alpha)
        if not alpha > 1:
            raise ValueError(f"alpha must be > 1, got {alpha}")
        # ||psi||^2 = (1/2pi) int_0^inf xi^(alpha-1) e^(-2 xi) dxi
        log_norm = 0.5 * (gammaln(alpha) - alpha * math.log(2.0) - math.log(2 * math.pi))
        # int |psi_hat|^2 / xi dxi for the normalised wavelet
        log_adm = gammaln(alpha - 1) - (alpha - 1) * math.log(2.0) - 2 * log_norm
        return cls(alpha, log_norm, math.exp(log_adm), (alpha - 1) / 2)

    def support_halfwidth(self, eps: float = SUPPORT_EPS) -> float:
        """Half-width (in units of scale) where |psi(t)| / |psi(0)| drops to ``eps``."""
        return math.sqrt(math.expm1(-4.0 * math.log(eps) / (self.alpha + 1)))


def wavelet_freq(params: WaveletParams, xi):
    """Normalised wavelet spectrum, evaluated in the log domain."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("wavelet_freq is defined for xi >= 0 only")
    out = np.zeros_like(xi)
    pos = xi > 0
    xp = xi[pos]
    out[pos] = np.exp(0.5 * (params.alpha - 1) * np.log(xp) - xp - params.log_l2_norm)
    return out if out.ndim else float(out)


def wavelet_time(params: WaveletParams, t):
    """Normalised time-domain wavelet, ``Gamma(p) (1 - i t)^(-p) / (2 pi ||psi||)`` with p=(alpha+1)/2."""
    t = np.asarray(t, dtype=float)
    p = 0.5 * (params.alpha + 1)
    logmod = gammaln(p) - math.log(2 * math.pi) - 0.5 * p * np.log1p(t * t) - params.log_l2_norm
    out = np.exp(logmod + 1j * p * np.arctan(t))
    return out if out.ndim else complex(out)


def scale_to_frequency(params: WaveletParams, y):
    """Peak frequency in Hz of the wavelet dilated to scale ``y`` seconds."""
    return (params.alpha - 1) / (4 * np.pi * np.asarray(y, dtype=float))


def frequency_to_scale(params: WaveletParams, f):
    return (params.alpha - 1) / (4 * np.pi * np.asarray(f, dtype=float))


@dataclass(frozen=True)
class SignalBuffer:
    samples: np.ndarray
    sample_interval: float
    origin_time: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if not np.iscomplexobj(samples):
            samples = samples.astype(float)
        else:
            samples = samples.astype(complex)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("signal must be a non-empty 1-d array")
        if not self.sample_interval > 0:
            raise ValueError("sample_interval must be positive")

    def __len__(self):
        return self.samples.size

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    @property
    def times(self) -> np.ndarray:
        return self.origin_time + np.arange(len(self)) * self.sample_interval

    @property
    def duration(self) -> float:
        return len(self) * self.sample_interval


@dataclass(frozen=True)
class TimeScaleGrid:
    times: np.ndarray
    scales: np.ndarray
    scale_spacing: str = "geometric"

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        scales = np.asarray(self.scales, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "scales", scales)
        if times.ndim != 1 or scales.ndim != 1 or times.size < 1 or scales.size < 1:
            raise ValueError("times and scales must be non-empty 1-d arrays")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(scales <= 0) or np.any(np.diff(scales) <= 0):
            raise ValueError("scales must be positive and strictly increasing")
        if self.scale_spacing != "geometric":
            raise ValueError(f"unsupported scale spacing {self.scale_spacing!r}")
        if scales.size > 2:
            ratios = scales[1:] / scales[:-1]
            if not np.allclose(ratios, ratios[0], rtol=1e-9, atol=0):
                raise ValueError("scales are not geometrically spaced")

    @classmethod
    def geometric(cls, times, y_min: float, y_max: float, voices_per_octave: int) -> "TimeScaleGrid":
        n = int(math.ceil(voices_per_octave * math.log2(y_max / y_min) - 1e-9)) + 1
        scales = y_min * 2.0 ** (np.arange(n) / voices_per_octave)
        return cls(times, scales)

    @property
    def shape(self) -> tuple[int, int]:
        return self.scales.size, self.times.size

    @property
    def log_ratio(self) -> float:
        if self.scales.size < 2:
            raise ValueError("a single-scale grid has no ratio")
        return float(math.log(self.scales[1] / self.scales[0]))

    @property
    def scale_edges(self) -> np.ndarray:
        """Geometric cell boundaries between consecutive scales."""
        return np.sqrt(self.scales[:-1] * self.scales[1:])

    def time_indices(self, signal: SignalBuffer) -> np.ndarray:
        """Sample indices of the grid times; they must coincide with sample instants."""
        pos = (self.times - signal.origin_time) / signal.sample_interval
        idx = np.rint(pos).astype(np.int64)
        if np.any(np.abs(pos - idx) > 1e-6) or idx[0] < 0 or idx[-1] >= len(signal):
            raise ValueError("grid times must be sample instants inside the signal")
        return idx


@dataclass(frozen=True)
class GridSpec:
    """Recipe for the time-scale lattice used on a signal of given sample rate.

    The scale range is given by the peak frequencies of the extreme scales.
    """

    sample_rate: float = 44100.0
    f_min: float = 1000.0
    f_max: float = 14000.0
    voices_per_octave: int = 64
    time_stride: int = 1

    def __post_init__(self):
        if not (0 < self.f_min < self.f_max):
            raise ValueError("need 0 < f_min < f_max")
        if self.voices_per_octave < 1 or self.time_stride < 1:
            raise ValueError("voices_per_octave and time_stride must be >= 1")

    def build(self, signal: SignalBuffer, params: WaveletParams) -> TimeScaleGrid:
        if not math.isclose(1.0 / signal.sample_interval, self.sample_rate, rel_tol=1e-9):
            raise ValueError(
                f"signal sample rate {1.0 / signal.sample_interval:g} Hz does not match grid "
                f"sample rate {self.sample_rate:g} Hz"
            )
        y_min = float(frequency_to_scale(params, self.f_max))
        y_max = float(frequency_to_scale(params, self.f_min))
        return TimeScaleGrid.geometric(signal.times[:: self.time_stride], y_min, y_max, self.voices_per_octave)

    def descriptor(self) -> dict:
        return {
            "sample_rate": self.sample_rate,
            "f_min": self.f_min,
            "f_max": self.f_max,
            "voices_per_octave": self.voices_per_octave,
            "time_stride": self.time_stride,
        }


@dataclass(frozen=True)
class Scalogram:
    grid: TimeScaleGrid
    values: np.ndarray
    params: WaveletParams
    normalization: str = "unit_l2_per_scale"
    # bookkeeping needed to synthesise a signal again
    n_samples: int = 0
    sample_interval: float = 1.0
    origin_time: float = 0.0
    real_input: bool = False
    col_index: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("scalogram contains non-finite values")

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    def with_values(self, values) -> "Scalogram":
        return Scalogram(
            self.grid, np.asarray(values), self.params, self.normalization,
            self.n_samples, self.sample_interval, self.origin_time, self.real_input, self.col_index,
        )


def _analysis_filters(params: WaveletParams, n: int, sample_interval: float):
    xi = 2 * np.pi * sfft.fftfreq(n, sample_interval)
    return xi, xi > 0


def forward_cwt(
    signal: SignalBuffer,
    params: WaveletParams,
    grid: TimeScaleGrid,
    max_support_ratio: float = 1.0,
) -> Scalogram:
    """Discrete CWT on ``grid`` via one forward FFT and one inverse FFT per scale.

    Scales whose wavelet support (``2 * support_halfwidth * y``) exceeds
    ``max_support_ratio`` times the signal duration are rejected.
    """
    n = len(signal)
    if n < 2:
        raise ValueError("signal must contain at least 2 samples")
    cols = grid.time_indices(signal)
    support = 2 * params.support_halfwidth() * grid.scales[-1]
    if support > max_support_ratio * signal.duration:
        raise ValueError(
            f"largest scale {grid.scales[-1]:g}s has support {support:g}s, more than "
            f"{max_support_ratio:g} x signal duration {signal.duration:g}s"
        )
    T = signal.sample_interval
    spec = sfft.fft(signal.samples)
    xi, pos = _analysis_filters(params, n, T)
    xi_pos = xi[pos]
    values = np.empty(grid.shape, dtype=complex)
    buf = np.zeros(n, dtype=complex)
    for j, y in enumerate(grid.scales):
        buf[:] = 0
        buf[pos] = spec[pos] * (math.sqrt(y) / T) * wavelet_freq(params, y * xi_pos)
        values[j] = sfft.ifft(buf)[cols]
    return Scalogram(grid, values, params, "unit_l2_per_scale", n, T, signal.origin_time, signal.is_real, cols)


def inverse_cwt(scalogram: Scalogram) -> SignalBuffer:
    """Riemann-sum reconstruction with hyperbolic weights ``dx dy / y^2``.

    Recovers the positive-frequency part of the analysed signal; for real input
    the real signal ``2 Re(.)`` is returned.
    """
    grid = scalogram.grid
    if grid.scales.size < 8:
        raise ValueError("reconstruction needs at least 8 scales")
    params = scalogram.params
    n, T = scalogram.n_samples, scalogram.sample_interval
    cols = scalogram.col_index
    if cols is None or n < 2:
        raise ValueError("scalogram lacks sampling bookkeeping; produce it with forward_cwt")
    dx = (grid.times[1] - grid.times[0]) if grid.times.size > 1 else T
    xi, pos = _analysis_filters(params, n, T)
    xi_pos = xi[pos]
    acc = np.zeros(n, dtype=complex)
    up = np.zeros(n, dtype=complex)
    dlog = grid.log_ratio
    for j, y in enumerate(grid.scales):
        up[:] = 0
        up[cols] = scalogram.values[j]
        U = sfft.fft(up)
        # conv with sampled psi_y has DFT psi_y_hat / T, and the plain-sum transform is the
        # continuous one divided by T, so the two T's cancel; weights dx and dy / y^2 = dlog / y
        w = dx * (dlog / y) * math.sqrt(y) * wavelet_freq(params, y * xi_pos)
        acc[pos] += U[pos] * w
    out = sfft.ifft(acc) / params.admissibility
    if scalogram.real_input:
        out = 2 * out.real
    return SignalBuffer(out, T, scalogram.origin_time)


def generate_white_noise(length: int, sample_interval: float, kind: str = "real", seed=None) -> SignalBuffer:
    """I.i.d. Gaussian samples of variance ``sample_interval`` (split evenly for complex)."""
    if length < 1 or not sample_interval > 0:
        raise ValueError("need length >= 1 and sample_interval > 0")
    rng = np.random.default_rng(seed)
    if kind == "real":
        samples = rng.standard_normal(length) * math.sqrt(sample_interval)
    elif kind == "complex":
        z = rng.standard_normal((2, length))
        samples = (z[0] + 1j * z[1]) * math.sqrt(sample_interval / 2)
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    return SignalBuffer(samples, sample_interval)


def refine_noise(coarse_from_fine: SignalBuffer) -> SignalBuffer:
    """Same white noise at twice the sample interval, by summing adjacent pairs.

    Pair ``(2l, 2l+1)`` covers the coarse cell ending at fine time ``2l+1``,
    so the origin moves forward by one fine interval.
    """
    s = coarse_from_fine.samples
    if s.size % 2:
        raise ValueError("noise length must be even to pair samples")
    T = coarse_from_fine.sample_interval
    return SignalBuffer(s[0::2] + s[1::2], 2 * T, coarse_from_fine.origin_time + T)
