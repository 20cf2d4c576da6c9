"""Synthetic test signals and noise mixing."""
from __future__ import annotations

import math

import numpy as np

from .wavelet import SignalBuffer


def _times(duration, sample_rate):
    n = int(round(duration * sample_rate))
    if n < 1:
        raise ValueError("duration too short for the sample rate")
    return np.arange(n) / sample_rate


def tone(freq, duration=2.0, sample_rate=44100.0, amplitude=1.0, phase=0.0) -> SignalBuffer:
    t = _times(duration, sample_rate)
    return SignalBuffer(amplitude * np.cos(2 * np.pi * freq * t + phase), 1.0 / sample_rate)


def multitone(freqs, amplitudes=None, duration=2.0, sample_rate=44100.0, seed=0) -> SignalBuffer:
    """Sum of cosines with random phases."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    amps = np.ones_like(freqs) if amplitudes is None else np.asarray(amplitudes, dtype=float)
    phases = np.random.default_rng(seed).uniform(0, 2 * np.pi, freqs.size)
    t = _times(duration, sample_rate)
    x = (amps[:, None] * np.cos(2 * np.pi * freqs[:, None] * t + phases[:, None])).sum(axis=0)
    return SignalBuffer(x, 1.0 / sample_rate)


def speech_like(duration=2.0, sample_rate=44100.0, f0=(110.0, 170.0), syllable_rate=4.0, seed=0) -> SignalBuffer:
    """Voiced harmonic stand-in for speech.

    The fundamental glides between the bounds of ``f0``, harmonics up to 8 kHz
    are shaped by three fixed formant bumps, and the amplitude is gated into
    syllables.
    """
    rng = np.random.default_rng(seed)
    t = _times(duration, sample_rate)
    lo, hi = f0
    f_inst = lo + (hi - lo) * 0.5 * (1 + np.sin(2 * np.pi * 0.7 * t + rng.uniform(0, 2 * np.pi)))
    phase = 2 * np.pi * np.cumsum(f_inst) / sample_rate
    formants = np.array([700.0, 1800.0, 3000.0])
    x = np.zeros_like(t)
    for k in range(1, int(8000 / lo) + 1):
        fk = k * f_inst
        env = np.exp(-0.5 * ((fk[:, None] - formants) / 250.0) ** 2).sum(axis=1) + 0.05
        x += env * np.where(fk < 8000, 1.0, 0.0) * np.cos(k * phase) / math.sqrt(k)
    gate = np.clip(np.sin(np.pi * syllable_rate * t) ** 2 * 1.5 - 0.2, 0, 1)
    x *= gate
    return SignalBuffer(x / np.max(np.abs(x)), 1.0 / sample_rate)


def click_train(duration=2.0, sample_rate=44100.0, rate=6.0, decay=2e-3, carrier=4000.0) -> SignalBuffer:
    """Decaying tone bursts at ``rate`` per second (castanet-like transients)."""
    t = _times(duration, sample_rate)
    x = np.zeros_like(t)
    for t0 in np.arange(0.5 / rate, t[-1], 1.0 / rate):
        d = t - t0
        on = d >= 0
        x[on] += np.exp(-d[on] / decay) * np.sin(2 * np.pi * carrier * d[on])
    return SignalBuffer(x, 1.0 / sample_rate)


def mix_at_snr(clean: SignalBuffer, snr_db: float, seed=None, noise=None) -> tuple[SignalBuffer, np.ndarray]:
    """Add white Gaussian noise scaled to ``snr_db`` (power ratio over the whole record)."""
    s = clean.samples
    if noise is None:
        noise = np.random.default_rng(seed).standard_normal(s.size)
    p_s = np.mean(np.abs(s) ** 2)
    p_n = np.mean(np.abs(noise) ** 2)
    if p_s == 0 or p_n == 0:
        raise ValueError("clean signal and noise must have positive power")
    scaled = noise * math.sqrt(p_s / (p_n * 10 ** (snr_db / 10)))
    return SignalBuffer(s + scaled, clean.sample_interval, clean.origin_time), scaled


def snr_db(reference, estimate) -> float:
    reference = np.asarray(reference)
    err = np.asarray(estimate) - reference
    return float(10 * np.log10(np.sum(np.abs(reference) ** 2) / np.sum(np.abs(err) ** 2)))
