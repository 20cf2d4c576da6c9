"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import io
from .errors import CalibrationError, DataError, QuadratureError
from .experiments import convergence_check, expected_roi_count, white_noise_tables
from .filtering import MASK_KINDS, CalibrationProfile, apply_mask, build_masks, calibrate
from .hyperbolic import RegionOfInterest, observation_window
from .pipeline import analyze
from .signals import click_train, mix_at_snr, multitone, snr_db, speech_like, tone
from .wavelet import EDGE_FACTOR, GridSpec, SignalBuffer, generate_white_noise, inverse_cwt

log = logging.getLogger("wavezero")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid_args(p):
    g = p.add_argument_group("grid")
    g.add_argument("--alpha", type=float, default=300.0, help="wavelet order (> 1)")
    g.add_argument("--sample-rate", type=float, default=44100.0)
    g.add_argument("--f-min", type=float, default=1000.0, help="lowest analysed peak frequency (Hz)")
    g.add_argument("--f-max", type=float, default=14000.0, help="highest analysed peak frequency (Hz)")
    g.add_argument("--voices", type=int, default=64, help="scales per octave")
    g.add_argument("--time-stride", type=int, default=1, help="keep every n-th sample instant")


def _out_arg(p, default):
    p.add_argument("--out-dir", type=Path, default=Path(default))


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wavezero", description="Zeros of Cauchy-wavelet scalograms and white-noise masks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="scalogram and zeros of an audio file")
    p.add_argument("--input", type=Path, required=True, help="WAV or raw float64 LE file")
    _grid_args(p)
    _out_arg(p, "out/analyze")

    p = sub.add_parser("calibrate", help="white-noise thresholds and estimator spreads")
    _grid_args(p)
    p.add_argument("--duration", type=float, default=2.0, help="seconds of noise per seed")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quantile", type=float, default=0.999)
    p.add_argument("--noise-kind", choices=("real", "complex"), default="real")
    p.add_argument("--center-stride", type=int, default=8)
    p.add_argument("--out", type=Path, default=Path("profile.json"))

    p = sub.add_parser("filter", help="mask and resynthesise a signal")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="WAV or raw float64 LE file")
    src.add_argument("--synthetic", choices=("tone", "multitone", "speech", "clicks", "noise"))
    p.add_argument("--tone-freq", type=float, default=3000.0)
    p.add_argument("--duration", type=float, default=2.0, help="length of synthetic input")
    p.add_argument("--snr-db", type=float, default=None, help="add white noise at this SNR")
    p.add_argument("--profile", type=Path, help="calibration profile (calibrates on the fly when absent)")
    p.add_argument("--calib-seeds", type=int, default=20)
    p.add_argument("--kind", choices=MASK_KINDS + ("all",), default="combined")
    p.add_argument("--dilate", type=int, default=0, help="grey dilation half-width of the masks")
    p.add_argument("--seed", type=int, default=0)
    _grid_args(p)
    _out_arg(p, "out/filter")

    p = sub.add_parser("simulate-gaf", help="zero pattern of one white-noise realisation")
    _grid_args(p)
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-kind", choices=("real", "complex"), default="complex")
    _out_arg(p, "out/gaf")

    p = sub.add_parser("tables", help="empirical vs closed-form disk and pair-correlation statistics")
    _grid_args(p)
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--center-stride", type=int, default=4)
    p.add_argument("--noise-kind", choices=("real", "complex"), default="real")
    p.add_argument("--out", type=Path, default=Path("tables.csv"))

    p = sub.add_parser("convergence-check", help="transform differences under dyadic noise refinement")
    p.add_argument("--alpha", type=float, default=300.0)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coarse-rate", type=float, default=8000.0)
    p.add_argument("--zero-signal", action="store_true", help="transform the zero signal instead of noise")
    p.add_argument("--out", type=Path, default=Path("convergence.csv"))
    return ap


def _resolved(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}


def _grid_spec(args) -> GridSpec:
    if not args.alpha > 1:
        raise UsageError("--alpha must be > 1")
    try:
        return GridSpec(args.sample_rate, args.f_min, args.f_max, args.voices, args.time_stride)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _n_samples(args) -> int:
    n = int(round(args.duration * args.sample_rate))
    if n < 2:
        raise UsageError("--duration too short")
    return n


def _prepare_out(path: Path, is_dir=True):
    target = path if is_dir else path.parent
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"{target}: cannot create output directory ({exc})") from exc


def _window_dict(w):
    return {"t_min": w.t_min, "t_max": w.t_max, "y_min": w.y_min, "y_max": w.y_max}


def cmd_analyze(args) -> int:
    spec = _grid_spec(args)
    signal = io.read_audio(args.input, args.sample_rate)
    _prepare_out(args.out_dir)
    a = analyze(signal, args.alpha, spec)
    cfg = _resolved(args)
    out = args.out_dir
    io.write_zeros_csv(out / "zeros.csv", a.zeros)
    io.write_pgm(out / "scalogram.pgm", a.scalogram.modulus, log_scale=True)
    cov = a.zeros.coverage
    io.write_svg_scatter(out / "zeros.svg", a.zeros, cov)
    for name in ("zeros.csv", "scalogram.pgm", "zeros.svg"):
        io.write_sidecar(out / name, cfg)
    io.write_json(out / "report.json", {
        "schema": io.REPORT_SCHEMA, "command": "analyze", "config": cfg,
        "n_samples": len(signal), "grid_shape": a.grid.shape, "n_zeros": len(a.zeros),
        "coverage": _window_dict(cov),
    })
    print(f"{len(a.zeros)} zeros on a {a.grid.shape[0]}x{a.grid.shape[1]} grid -> {out}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    spec = _grid_spec(args)
    if args.seeds < 1 or not 0 < args.quantile < 1 or args.center_stride < 1:
        raise UsageError("need --seeds >= 1, 0 < --quantile < 1, --center-stride >= 1")
    _prepare_out(args.out, is_dir=False)
    t0 = time.perf_counter()
    prof = calibrate(args.alpha, spec, _n_samples(args), n_seeds=args.seeds, quantile_level=args.quantile,
                     seed=args.seed, noise_kind=args.noise_kind, center_stride=args.center_stride)
    prof.save(args.out)
    io.write_sidecar(args.out, _resolved(args))
    c = prof.config
    print(f"calibrated on {prof.n_centers} centres in {time.perf_counter() - t0:.1f}s: "
          f"b_intensity={c.b_intensity:.3f} b_pcf={c.b_pcf:.3f} b_combined={c.b_combined:.3f} -> {args.out}")
    return EXIT_OK


def _synthetic(args, rate) -> SignalBuffer:
    kind = args.synthetic
    if kind == "tone":
        return tone(args.tone_freq, args.duration, rate)
    if kind == "multitone":
        return multitone([1500.0, 3000.0, 6000.0], duration=args.duration, sample_rate=rate, seed=args.seed)
    if kind == "speech":
        return speech_like(args.duration, rate, seed=args.seed)
    if kind == "clicks":
        return click_train(args.duration, rate)
    return generate_white_noise(int(round(args.duration * rate)), 1.0 / rate, "real", args.seed)


def cmd_filter(args) -> int:
    if args.profile is not None:
        try:
            prof = CalibrationProfile.load(args.profile)
        except (OSError, ValueError, KeyError) as exc:
            raise DataError(f"{args.profile}: cannot read calibration profile ({exc})") from exc
        spec = prof.grid_spec()
    else:
        spec = _grid_spec(args)
        prof = None
    alpha = prof.alpha if prof else args.alpha
    clean = None
    if args.input is not None:
        signal = io.read_audio(args.input, spec.sample_rate if args.input.suffix.lower() != ".wav" else None)
        if not np.isclose(1.0 / signal.sample_interval, spec.sample_rate):
            raise DataError(f"{args.input}: sample rate {1.0 / signal.sample_interval:g} Hz does not match "
                            f"the grid's {spec.sample_rate:g} Hz")
    else:
        signal = _synthetic(args, spec.sample_rate)
        if args.synthetic != "noise":
            clean = signal
    if args.snr_db is not None:
        signal, _ = mix_at_snr(signal, args.snr_db, seed=np.random.SeedSequence([args.seed, 1]))
    if prof is None:
        warnings.warn("no calibration profile given; calibrating on white noise now", stacklevel=1)
        prof = calibrate(alpha, spec, len(signal), n_seeds=args.calib_seeds, seed=args.seed + 1)
    _prepare_out(args.out_dir)
    out = args.out_dir
    cfg = _resolved(args)
    a = analyze(signal, alpha, spec)
    kinds = MASK_KINDS if args.kind == "all" else (args.kind,)
    masks, maps, roi = build_masks(a.zeros, a.grid, prof, kinds, dilate=args.dilate)
    roi_mask = roi.grid_mask(a.grid)
    io.write_pgm(out / "scalogram.pgm", a.scalogram.modulus, log_scale=True)
    written = ["scalogram.pgm"]
    report = {
        "schema": io.REPORT_SCHEMA, "command": "filter", "config": cfg,
        "alpha": alpha, "grid": spec.descriptor(), "n_zeros": len(a.zeros),
        "n_zeros_roi": int(np.count_nonzero(roi.contains(a.zeros.x, a.zeros.y))),
        "roi": {**_window_dict(roi.window), "margin": roi.margin, "n_pixels": int(roi_mask.sum())},
        "thresholds": {"intensity": prof.config.b_intensity, "pcf": prof.config.b_pcf,
                       "combined": prof.config.b_combined, "gain_a": prof.config.a,
                       "quantile_level": prof.quantile_level},
        "masks": {},
    }
    ref_band = inverse_cwt(analyze(clean, alpha, spec).scalogram).samples if clean is not None else None
    unmasked = inverse_cwt(a.scalogram).samples
    lo, hi = _interior(len(signal))
    for kind, mask in masks.items():
        filtered = inverse_cwt(apply_mask(a.scalogram, mask))
        io.write_wav(out / f"filtered_{kind}.wav", filtered)
        io.write_pgm(out / f"mask_{kind}.pgm", mask.values)
        io.write_pgm(out / f"filtered_scalogram_{kind}.pgm", np.abs(a.scalogram.values * mask.values), log_scale=True)
        written += [f"filtered_{kind}.wav", f"mask_{kind}.pgm", f"filtered_scalogram_{kind}.pgm"]
        entry = {"coverage_roi": mask.coverage(roi_mask),
                 "energy_kept": float(np.sum(np.abs(a.scalogram.values * mask.values) ** 2)
                                      / np.sum(np.abs(a.scalogram.values) ** 2))}
        if ref_band is not None:
            entry["snr_in_db"] = snr_db(ref_band[lo:hi], unmasked[lo:hi])
            entry["snr_out_db"] = snr_db(ref_band[lo:hi], filtered.samples[lo:hi])
        report["masks"][kind] = entry
    for name in written:
        io.write_sidecar(out / name, cfg)
    io.write_json(out / "report.json", report)
    for kind, e in report["masks"].items():
        extra = f", SNR {e['snr_in_db']:.1f} -> {e['snr_out_db']:.1f} dB" if "snr_out_db" in e else ""
        print(f"{kind}: mask covers {100 * e['coverage_roi']:.2f}% of ROI{extra}")
    return EXIT_OK


def _interior(n, keep=0.8):
    cut = int(n * (1 - keep) / 2)
    return cut, n - cut


def cmd_simulate_gaf(args) -> int:
    spec = _grid_spec(args)
    n = _n_samples(args)
    _prepare_out(args.out_dir)
    noise = generate_white_noise(n, 1.0 / spec.sample_rate, args.noise_kind, args.seed)
    a = analyze(noise, args.alpha, spec)
    window = observation_window(a.grid, EDGE_FACTOR)
    roi = RegionOfInterest(window, 0.0)
    in_roi = int(np.count_nonzero(roi.contains(a.zeros.x, a.zeros.y)))
    expected = expected_roi_count(args.alpha, roi)
    out = args.out_dir
    cfg = _resolved(args)
    io.write_zeros_csv(out / "zeros.csv", a.zeros)
    io.write_pgm(out / "zeros.pgm", io.zero_raster(a.zeros, (400, 1000), a.zeros.coverage) > 0)
    io.write_svg_scatter(out / "zeros.svg", a.zeros, window)
    for name in ("zeros.csv", "zeros.pgm", "zeros.svg"):
        io.write_sidecar(out / name, cfg)
    io.write_json(out / "report.json", {
        "schema": io.REPORT_SCHEMA, "command": "simulate-gaf", "config": cfg,
        "n_zeros": len(a.zeros), "window": _window_dict(window),
        "n_zeros_window": in_roi, "expected_window": expected,
    })
    print(f"{len(a.zeros)} zeros; {in_roi} inside the observation window (expected {expected:.1f}) -> {out}")
    return EXIT_OK


def cmd_tables(args) -> int:
    spec = _grid_spec(args)
    if args.seeds < 1 or args.center_stride < 1:
        raise UsageError("need --seeds >= 1 and --center-stride >= 1")
    _prepare_out(args.out, is_dir=False)
    res = white_noise_tables(args.alpha, args.seeds, args.seed, spec, _n_samples(args),
                             center_stride=args.center_stride, noise_kind=args.noise_kind)
    res.to_csv(args.out)
    io.write_sidecar(args.out, _resolved(args))
    print(f"{res.n_centers} centres over {res.n_seeds} seeds -> {args.out}")
    return EXIT_OK


def cmd_convergence_check(args) -> int:
    if args.levels < 2 or args.seeds < 1:
        raise UsageError("need --levels >= 2 and --seeds >= 1")
    if not args.alpha > 1:
        raise UsageError("--alpha must be > 1")
    _prepare_out(args.out, is_dir=False)
    res = convergence_check(args.alpha, args.levels, args.seeds, args.seed, args.coarse_rate,
                            zero_signal=args.zero_signal)
    res.to_csv(args.out)
    io.write_sidecar(args.out, _resolved(args))
    print("mean sup-differences:", " ".join(f"{m:.4g}" for m in res.mean),
          "(decreasing)" if res.decreasing() else "(NOT decreasing)")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "calibrate": cmd_calibrate,
    "filter": cmd_filter,
    "simulate-gaf": cmd_simulate_gaf,
    "tables": cmd_tables,
    "convergence-check": cmd_convergence_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"wavezero: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, CalibrationError, ArithmeticError) as exc:
        print(f"wavezero: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError, ValueError) as exc:
        print(f"wavezero: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
