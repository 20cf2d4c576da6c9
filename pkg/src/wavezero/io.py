"""File formats: WAV and raw float64 audio, CSV, PGM/SVG images, JSON reports."""
from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import DataError
from .hyperbolic import Window
from .wavelet import SignalBuffer
from .zeros import ZeroSet

REPORT_SCHEMA = "wavezero.report/1"


def read_audio(path, sample_rate: float | None = None) -> SignalBuffer:
    """Mono float64 signal from a WAV file or a raw little-endian float64 file.

    Raw files carry no header, so ``sample_rate`` is required for them.
    Multichannel WAVs are averaged to mono with a warning.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    if path.suffix.lower() == ".wav":
        try:
            rate, data = wavfile.read(path)
        except ValueError as exc:
            raise DataError(f"{path}: unsupported WAV file ({exc})") from exc
        if data.dtype == np.int16:
            x = data / 32768.0
        elif data.dtype == np.int32:
            # 24-bit PCM is returned left-justified in int32
            x = data / 2147483648.0
        elif data.dtype in (np.float32, np.float64):
            x = data.astype(np.float64)
        else:
            raise DataError(f"{path}: unsupported sample encoding {data.dtype}; use 16/24-bit PCM or float")
        if x.ndim == 2:
            warnings.warn(f"{path}: {x.shape[1]} channels downmixed to mono", stacklevel=2)
            x = x.mean(axis=1)
        if sample_rate is not None and not np.isclose(rate, sample_rate):
            raise DataError(f"{path}: sample rate {rate} Hz, expected {sample_rate:g} Hz")
    else:
        if sample_rate is None:
            raise DataError(f"{path}: raw float64 input needs an explicit sample rate")
        raw = path.read_bytes()
        if len(raw) % 8:
            raise DataError(f"{path}: size {len(raw)} is not a multiple of 8 bytes")
        x, rate = np.frombuffer(raw, dtype="<f8").astype(np.float64), sample_rate
    if x.size < 2:
        raise DataError(f"{path}: fewer than two samples")
    if not np.all(np.isfinite(x)):
        raise DataError(f"{path}: non-finite samples")
    return SignalBuffer(x, 1.0 / float(rate))


def write_wav(path, signal: SignalBuffer):
    rate = int(round(1.0 / signal.sample_interval))
    wavfile.write(path, rate, np.real(signal.samples).astype(np.float32))


def write_raw(path, signal: SignalBuffer):
    Path(path).write_bytes(np.real(signal.samples).astype("<f8").tobytes())


def write_zeros_csv(path, zeros: ZeroSet):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x_seconds", "y_scale"])
        for a, b in zip(zeros.x, zeros.y):
            w.writerow([repr(float(a)), repr(float(b))])


def read_zeros_csv(path, alpha=None) -> ZeroSet:
    try:
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", "loadtxt: input contained no data")
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise DataError(f"{path}: malformed zeros CSV ({exc})") from exc
    if data.size == 0:
        return ZeroSet(np.empty(0), np.empty(0), alpha=alpha)
    return ZeroSet(data[:, 0], data[:, 1], alpha=alpha)


def write_pgm(path, image, log_scale: bool = False):
    """Binary 8-bit graymap; row 0 of ``image`` is drawn at the top."""
    img = np.asarray(image, dtype=float)
    if log_scale:
        img = np.log10(np.maximum(img, np.max(img) * 1e-8 if np.max(img) > 0 else 1e-300))
    lo, hi = np.min(img), np.max(img)
    scaled = np.zeros(img.shape) if hi == lo else (img - lo) / (hi - lo)
    px = np.round(255 * scaled).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{px.shape[1]} {px.shape[0]}\n255\n".encode())
        fh.write(px.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    head = data.split(maxsplit=4)
    if head[0] != b"P5":
        raise DataError(f"{path}: not a binary PGM")
    w, h = int(head[1]), int(head[2])
    return np.frombuffer(head[4][: w * h], dtype=np.uint8).reshape(h, w)


def zero_raster(zeros: ZeroSet, shape, window: Window) -> np.ndarray:
    """Zero counts on a ``shape`` raster of ``window``; small scales (high frequency) on top."""
    h, w = shape
    img = np.zeros(shape)
    if len(zeros):
        col = (zeros.x - window.t_min) / (window.t_max - window.t_min) * w
        row = np.log(zeros.y / window.y_min) / np.log(window.y_max / window.y_min) * h
        ok = (col >= 0) & (col < w) & (row >= 0) & (row < h)
        np.add.at(img, (row[ok].astype(int), col[ok].astype(int)), 1)
    return img


def write_svg_scatter(path, zeros: ZeroSet, window: Window, width=900, height=400, roi=None):
    """Zero positions over time (x) and log-scale (y, small scales on top)."""
    def pos(x, y):
        return ((x - window.t_min) / (window.t_max - window.t_min) * width,
                np.log(y / window.y_min) / np.log(window.y_max / window.y_min) * height)

    keep = window.contains(zeros.x, zeros.y) if len(zeros) else np.zeros(0, bool)
    px, py = pos(zeros.x[keep], zeros.y[keep])
    dots = "".join(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="0.8"/>' for a, b in zip(px, py))
    with open(path, "w") as fh:
        fh.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
                 f'<rect width="100%" height="100%" fill="white"/><g fill="black">{dots}</g></svg>\n')


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sidecar(artifact, config: dict):
    """``<artifact>.json`` holding the resolved configuration that produced it."""
    write_json(f"{artifact}.json", {"schema": REPORT_SCHEMA, "artifact": Path(artifact).name, "config": config})
