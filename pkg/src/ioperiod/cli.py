"""Command-line front end: offline detection, online prediction, trace
generation, benchmark sweeps, and spectrum export.

Defaults can be overridden through ``IOPERIOD_*`` environment variables
(e.g. ``IOPERIOD_FREQ=100``).  Machine-readable output goes to stdout (or a
file); diagnostics and warnings go to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import synth
from .detection import DEFAULT_TOLERANCE, DEFAULT_Z_MIN
from .online import watch
from .pipeline import analyze_trace
from .sampling import discretize
from .spectral import dft
from .trace import TraceParseError, TraceValidationError, merge_bandwidth, parse_trace, write_trace

DEFAULT_FS = 10.0

ENV_PREFIX = "IOPERIOD_"


def _env_default(name: str, fallback, cast=float):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"invalid value for {ENV_PREFIX}{name}: {raw!r}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--freq", type=float,
                        default=_env_default("FREQ", DEFAULT_FS),
                        help="sampling frequency in Hz (default 10)")
    parser.add_argument("--tolerance", type=float,
                        default=_env_default("TOLERANCE", DEFAULT_TOLERANCE),
                        help="candidate Z-score tolerance fraction (default 0.8)")
    parser.add_argument("--z-min", type=float,
                        default=_env_default("Z_MIN", DEFAULT_Z_MIN),
                        help="minimum outlier Z-score (default 3)")
    parser.add_argument("--kind", choices=["read", "write", "both"], default="both",
                        help="which request kinds to analyze")
    parser.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"),
                        default=None, help="analysis time window in seconds")


def _open_out(path: str | None):
    return open(path, "w") if path else sys.stdout


def _format_text(result: dict) -> str:
    lines = [f"confidence: {result['confidence']}"]
    if result["period_s"] is not None:
        lines.append(f"period: {result['period_s']:.4g} s "
                     f"(frequency {result['frequency_hz']:.4g} Hz)")
    lines.append(f"candidates: {len(result['candidates'])}")
    for c in result["candidates"]:
        lines.append(f"  k={c['k']}  f={c['frequency_hz']:.6g} Hz  z={c['zscore']:.3g}")
    if result["suppressed"]:
        lines.append("suppressed harmonics: "
                     + ", ".join(f"{f:.6g} Hz" for f in result["suppressed"]))
    m = result.get("metrics")
    if m:
        for key in ("r_io", "b_io", "sigma_vol", "sigma_time", "data_per_period", "score"):
            if m.get(key) is not None:
                lines.append(f"{key}: {m[key]:.6g}")
    if result.get("no_data"):
        lines.append("no data in the analysis window")
    return "\n".join(lines)


def _cmd_detect(args) -> int:
    trace = parse_trace(args.trace, kind_filter=args.kind)
    window = tuple(args.window) if args.window else None
    analysis = analyze_trace(trace, args.freq, window=window,
                             tolerance=args.tolerance, z_min=args.z_min)
    if args.spectrum_out and analysis.spectrum is not None:
        analysis.spectrum.to_csv(args.spectrum_out,
                                 amplitude_scale=analysis.volume_scale)
    out = _open_out(args.output)
    result = analysis.to_dict()
    if args.format == "json":
        out.write(json.dumps(result) + "\n")
    elif args.format == "text":
        out.write(_format_text(result) + "\n")
    else:  # csv: single flat row
        m = result.get("metrics") or {}
        cols = ["period_s", "frequency_hz", "confidence", "sampling_error"]
        mcols = ["r_io", "b_io", "sigma_vol", "sigma_time", "data_per_period", "score"]
        out.write(",".join(cols + mcols) + "\n")
        vals = [result[c] for c in cols] + [m.get(c) for c in mcols]
        out.write(",".join("" if v is None else str(v) for v in vals) + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_predict(args) -> int:
    out = _open_out(args.output)
    try:
        for record in watch(args.trace, args.freq,
                            poll_interval=args.watch_interval,
                            idle_timeout=args.idle_timeout,
                            tolerance=args.tolerance, z_min=args.z_min,
                            kind=args.kind,
                            fixed_window=args.fixed_window):
            out.write(json.dumps(record.to_dict()) + "\n")
            out.flush()
    except KeyboardInterrupt:
        pass
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _load_config_file(path: str) -> dict:
    with open(path) as f:
        return json.load(f)


def _synth_config(args) -> synth.SynthConfig:
    params = {
        "iterations": args.iterations,
        "processes": args.processes,
        "compute_mean": args.compute_mean,
        "compute_std": args.compute_std,
        "desync_mean": args.desync_mean,
        "noise": args.noise,
        "seed": args.seed,
    }
    if args.config:
        params.update(_load_config_file(args.config))
    templates = synth.bundled_phase_templates(
        count=args.templates, processes=params["processes"],
        request_bytes=args.request_bytes, seed=params["seed"],
    )
    return synth.SynthConfig(templates=tuple(templates), **params)


def _cmd_generate(args) -> int:
    trace, truth = synth.generate(_synth_config(args))
    write_trace(trace, args.out)
    if args.truth:
        with open(args.truth, "w") as f:
            json.dump({
                "iteration_starts": truth.iteration_starts.tolist(),
                "phase_bounds": [list(b) for b in truth.phase_bounds],
                "lambda_avg": truth.lambda_avg,
            }, f)
    print(f"wrote {len(trace)} requests to {args.out} "
          f"(mean iteration length {truth.lambda_avg:.3g} s)", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    grid = {}
    if args.noise:
        grid["noise"] = args.noise.split(",")
    if args.compute_mean_grid:
        grid["compute_mean"] = [float(v) for v in args.compute_mean_grid.split(",")]
    if args.compute_std_grid:
        grid["compute_std"] = [float(v) for v in args.compute_std_grid.split(",")]
    if args.desync_mean_grid:
        grid["desync_mean"] = [float(v) for v in args.desync_mean_grid.split(",")]
    if not grid:
        grid = {"noise": ["none"]}
    base_params = {}
    if args.config:
        base_params = _load_config_file(args.config)
    templates = synth.bundled_phase_templates(
        processes=base_params.get("processes", args.processes),
        request_bytes=args.request_bytes, seed=args.seed,
    )
    base = synth.SynthConfig(
        iterations=args.iterations,
        processes=base_params.get("processes", args.processes),
        templates=tuple(templates),
        **{k: v for k, v in base_params.items() if k != "processes"},
    )
    rows = synth.sweep(grid, args.repetitions, base, fs=args.freq, seed=args.seed,
                       tolerance=args.tolerance, z_min=args.z_min)
    out = _open_out(args.out)
    try:
        synth.sweep_to_csv(rows, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_spectrum(args) -> int:
    trace = parse_trace(args.trace, kind_filter=args.kind)
    if len(trace) == 0:
        print("empty trace", file=sys.stderr)
        return 1
    signal = merge_bandwidth(trace)
    window = tuple(args.window) if args.window else None
    sampled = discretize(signal, args.freq, window=window)
    spectrum = dft(sampled)
    out = _open_out(args.out)
    try:
        spectrum.to_csv(out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ioperiod",
        description="Detect and predict the periodicity of I/O phases from "
                    "bandwidth-over-time traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="offline periodicity detection on a trace file")
    p.add_argument("trace")
    _add_common(p)
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--output", default=None, help="write the result here instead of stdout")
    p.add_argument("--spectrum-out", default=None, help="also export the spectrum as CSV")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("predict", help="watch a growing trace file and stream predictions")
    p.add_argument("trace")
    _add_common(p)
    p.add_argument("--watch-interval", type=float,
                   default=_env_default("WATCH_INTERVAL", 1.0),
                   help="polling interval in seconds")
    p.add_argument("--idle-timeout", type=float, default=None,
                   help="stop after this many seconds without new data")
    p.add_argument("--fixed-window", type=float, default=None,
                   help="use a fixed-length window instead of period adaptation")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("generate", help="generate a semi-synthetic trace file")
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None, help="write generator ground truth as JSON")
    p.add_argument("--config", default=None, help="JSON key-value config file")
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--processes", type=int, default=synth.DEFAULT_PROCESSES)
    p.add_argument("--compute-mean", type=float, default=11.0)
    p.add_argument("--compute-std", type=float, default=0.0)
    p.add_argument("--desync-mean", type=float, default=0.0)
    p.add_argument("--noise", choices=list(synth.NOISE_LEVELS), default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--templates", type=int, default=10, help="size of the template library")
    p.add_argument("--request-bytes", type=int, default=synth.DEFAULT_REQUEST_BYTES)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("bench", help="benchmark detection error over a parameter grid")
    _add_common(p)
    p.set_defaults(freq=_env_default("FREQ", 1.0))
    p.add_argument("--out", default=None, help="sweep CSV (default stdout)")
    p.add_argument("--config", default=None, help="JSON key-value base config")
    p.add_argument("--repetitions", type=int, default=30)
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--processes", type=int, default=synth.DEFAULT_PROCESSES)
    p.add_argument("--noise", default=None, help="comma list, e.g. none,low,high")
    p.add_argument("--compute-mean-grid", default=None, help="comma list of seconds")
    p.add_argument("--compute-std-grid", default=None, help="comma list of seconds")
    p.add_argument("--desync-mean-grid", default=None, help="comma list of seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--request-bytes", type=int, default=16_000_000,
                   help="template request size (coarser is faster)")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("spectrum", help="export the single-sided spectrum as CSV")
    p.add_argument("trace")
    _add_common(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_spectrum)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TraceParseError, TraceValidationError, synth.SynthConfigError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
