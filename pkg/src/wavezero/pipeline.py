"""Signal -> scalogram -> zeros, the chain shared by calibration, experiments and the CLI."""
from __future__ import annotations

from dataclasses import dataclass

from .wavelet import GridSpec, Scalogram, SignalBuffer, TimeScaleGrid, WaveletParams, forward_cwt, generate_white_noise
from .zeros import ZeroSet, extract_zeros


@dataclass
class Analysis:
    params: WaveletParams
    grid: TimeScaleGrid
    scalogram: Scalogram
    zeros: ZeroSet


def analyze(signal: SignalBuffer, alpha: float, grid_spec: GridSpec, neighborhood: str = "four") -> Analysis:
    params = WaveletParams.from_alpha(alpha)
    grid = grid_spec.build(signal, params)
    scal = forward_cwt(signal, params, grid)
    return Analysis(params, grid, scal, extract_zeros(scal, neighborhood))


def white_noise_zeros(alpha: float, grid_spec: GridSpec, n_samples: int, seed=None, kind: str = "real"):
    """Zeros of the transform of one white-noise realisation; returns ``(zeros, grid)``."""
    noise = generate_white_noise(n_samples, 1.0 / grid_spec.sample_rate, kind, seed)
    a = analyze(noise, alpha, grid_spec)
    return a.zeros, a.grid
