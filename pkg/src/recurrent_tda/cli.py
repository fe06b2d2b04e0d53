"""Command-line harness: signal generation, diagrams, denoising, sweeps.

Subcommands
-----------
synth       write the synthetic recurrent signal (and optionally a noisy copy)
ph          persistence diagram of a signal CSV's state-space cloud
denoise     run one filter over a signal CSV
experiment  full RMSE-vs-SNR sweep from a JSON config
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from recurrent_tda.denoise import (
    AXIS_EQUALIZATION,
    MODES,
    DenoiseParams,
    apply_filter,
    complex_from_scale_matrix,
    edges_from_scale_matrix,
    equalized_axes,
)
from recurrent_tda.experiment import ConfigError, parse_config, run_experiment
from recurrent_tda.filtration import write_complex_csv
from recurrent_tda.frames import read_signal_csv, write_signal_csv
from recurrent_tda.geometry import ellipsoid_field, pairwise_scale_matrix
from recurrent_tda.persistence import (
    NoRecurrentLoopError,
    flag_diagram,
    write_diagram_csv,
)
from recurrent_tda.synth import NoiseSpec, SignalSpec, add_noise, generate_signal

logger = logging.getLogger("recurrent_tda.cli")


def _add_synth(subparsers):
    p = subparsers.add_parser("synth", help="emit clean/noisy signal CSVs")
    p.add_argument("--out", required=True, help="path for the clean signal CSV")
    p.add_argument("--noisy-out", help="optional path for a noisy copy")
    p.add_argument("--snr", type=float, default=math.inf, help="noise SNR in dB (default: inf)")
    p.add_argument("--seed", type=int, default=0, help="noise generator seed")
    p.add_argument("--n", type=int, default=500, help="number of samples")
    p.add_argument("--f-start", type=float, default=1.0, help="start frequency in Hz")
    p.add_argument("--f-end", type=float, default=10.0, help="end frequency in Hz")
    p.add_argument("--t-max", type=float, default=2.0, help="record length in seconds")
    p.add_argument("--squeeze-depth", type=float, default=0.9)
    p.add_argument("--squeeze-width", type=float, default=0.5)


def _add_ph(subparsers):
    p = subparsers.add_parser("ph", help="persistence diagram of a signal CSV")
    p.add_argument("input", help="signal CSV path")
    p.add_argument("--mode", choices=("ellipsoidal", "spherical"), default="ellipsoidal")
    p.add_argument("--rho", type=float, default=3.0, help="ellipsoid axis ratio")
    p.add_argument("--gradient-window", type=int, default=3)
    p.add_argument("--search-tol", type=float, default=1e-6)
    p.add_argument("--alpha-max", type=float, default=None, help="filtration truncation scale")
    p.add_argument(
        "--axis-equalization",
        type=float,
        default=AXIS_EQUALIZATION,
        help="axis rescaling exponent: 0 raw, 1 equal half-ranges",
    )
    p.add_argument("--out", help="diagram CSV path (default: stdout)")
    p.add_argument("--complex-out", help="optional path for the filtered-complex CSV")


def _add_denoise(subparsers):
    p = subparsers.add_parser("denoise", help="denoise a signal CSV with one filter")
    p.add_argument("input", help="signal CSV path")
    p.add_argument("--mode", choices=MODES, default="ellipsoidal")
    p.add_argument("--rho", type=float, default=3.0, help="ellipsoid axis ratio")
    p.add_argument("--k", type=int, default=20, help="neighbour count for knn mode")
    p.add_argument("--window", type=int, default=20, help="moving-average window")
    p.add_argument("--segment", type=int, default=100, help="adaptive segment length")
    p.add_argument("--gradient-window", type=int, default=3)
    p.add_argument(
        "--axis-equalization",
        type=float,
        default=AXIS_EQUALIZATION,
        help="axis rescaling exponent for topological modes",
    )
    p.add_argument("--snr", type=float, default=math.inf, help="add noise first at this SNR (dB)")
    p.add_argument("--seed", type=int, default=0, help="noise generator seed")
    p.add_argument("--out", help="denoised signal CSV path (default: stdout)")


def _add_experiment(subparsers):
    p = subparsers.add_parser("experiment", help="run the RMSE-vs-SNR sweep")
    p.add_argument("--config", required=True, help="JSON config path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recurrent-tda",
        description="Topological low-pass filtering of recurrent signals",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_synth(subparsers)
    _add_ph(subparsers)
    _add_denoise(subparsers)
    _add_experiment(subparsers)
    return parser


def _cmd_synth(args) -> int:
    spec = SignalSpec(
        f_start=args.f_start,
        f_end=args.f_end,
        t_max=args.t_max,
        n=args.n,
        squeeze_depth=args.squeeze_depth,
        squeeze_width=args.squeeze_width,
    )
    clean = generate_signal(spec)
    write_signal_csv(clean, args.out)
    if args.noisy_out:
        noisy = add_noise(clean, NoiseSpec(snr_db=args.snr, seed=args.seed))
        write_signal_csv(noisy, args.noisy_out)
    return 0


def _cmd_ph(args) -> int:
    frame = read_signal_csv(args.input)
    rho = args.rho if args.mode == "ellipsoidal" else 1.0
    geometry = equalized_axes(frame.values, args.axis_equalization)
    shapes = ellipsoid_field(geometry, rho, args.gradient_window)
    matrix = pairwise_scale_matrix(geometry, shapes, args.search_tol)
    diagram = flag_diagram(
        edges_from_scale_matrix(matrix, alpha_max=args.alpha_max), frame.n_samples
    )
    write_diagram_csv(diagram, args.out if args.out else sys.stdout)
    if args.complex_out:
        complex_ = complex_from_scale_matrix(matrix, alpha_max=args.alpha_max)
        write_complex_csv(complex_, args.complex_out)
    return 0


def _cmd_denoise(args) -> int:
    frame = read_signal_csv(args.input)
    if not math.isinf(args.snr):
        frame = add_noise(frame, NoiseSpec(snr_db=args.snr, seed=args.seed))
    params = DenoiseParams(
        mode=args.mode,
        rho=args.rho,
        k=args.k,
        window=args.window,
        segment=args.segment,
        gradient_window=args.gradient_window,
        axis_equalization=args.axis_equalization,
    )
    try:
        denoised, _ = apply_filter(frame, params)
    except NoRecurrentLoopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_signal_csv(denoised, args.out if args.out else sys.stdout)
    return 0


def _cmd_experiment(args) -> int:
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    print(
        f"wrote {report.results_path}: {len(report.rows)} rows, "
        f"{report.declared_failures} filter warnings, {report.internal_errors} errors"
    )
    return 0 if report.internal_errors == 0 else 1


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    handlers = {
        "synth": _cmd_synth,
        "ph": _cmd_ph,
        "denoise": _cmd_denoise,
        "experiment": _cmd_experiment,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
