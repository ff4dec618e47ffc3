"""``molauth`` command line: gen-cir, estimate, threshold, roc.

Exit codes: 0 success, 2 validation/domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import concentration, peak_time, sample_cir
from .config import ExperimentConfig, load_config
from .detect import compute_threshold
from .errors import IdentifiabilityError, MolAuthError
from .estimation import (IDENTIFIABILITY_CONDITION, TrainingFrame, build_training_matrix,
                         check_identifiability, ls_estimate, synthesize_received)
from .montecarlo import DfMode, run_roc
from .serialize import (CIR_HEADER, CIR_PLOT_SCRIPT, ROC_HEADER, ROC_PLOT_SCRIPT, csv_text,
                        json_arrays, roc_filename, roc_rows, write_text)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
CURVE_POINTS = 1000


class _IOFailure(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        write_text(out, text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {out}: {exc}") from exc


def _config(args) -> ExperimentConfig:
    if args.config is None:
        raise MolAuthError("--config is required for this subcommand")
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        raise _IOFailure(f"cannot read config {args.config}: {exc}") from exc
    if getattr(args, "df_mode", None):
        cfg = dataclasses.replace(cfg, df_mode=DfMode(args.df_mode))
    return cfg


def cmd_gen_cir(args) -> int:
    cfg = _config(args)
    L = args.tap_count or cfg.tap_counts[0]
    params = cfg.alice_params(L)
    tap_t = params.tap_times()
    curve_t = np.linspace(0.0, 4.0 * peak_time(params), CURVE_POINTS)
    rows = list(zip(tap_t, sample_cir(params).taps))
    rows += list(zip(curve_t, concentration(params, curve_t)))
    _emit(csv_text(CIR_HEADER, rows), args.out)
    if args.plot_script:
        if args.out is None:
            raise MolAuthError("--plot-script needs --out so the script can reference the CSV")
        script = Path(args.out).with_name("plot_cir.py")
        _emit(CIR_PLOT_SCRIPT.format(csv_name=Path(args.out).name, tap_count=L), str(script))
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = _config(args)
    L = args.tap_count or cfg.tap_counts[0]
    sigma2 = cfg.sigma2s[0] if args.sigma2 is None else args.sigma2
    if sigma2 < 0:
        raise MolAuthError("--sigma2 must be >= 0")
    seed = cfg.seed if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    h_true = sample_cir(cfg.alice_params(L))
    frame = TrainingFrame.random(args.frame_length, rng)
    if not check_identifiability(frame, L):
        raise IdentifiabilityError(
            f"identifiability condition {IDENTIFIABILITY_CONDITION} violated: "
            f"frame of {args.frame_length} symbols gives k_m−k_1 = {frame.span} < 2L = {2 * L}")
    B = build_training_matrix(frame, L)
    received = synthesize_received(h_true, frame, sigma2, rng)
    est = ls_estimate(B, received, sigma2)
    _emit(json_arrays({"h_true": h_true.taps, "h_hat": est.h_hat,
                       "sigma_h_diag": np.diag(est.covariance)}), args.out)
    return EXIT_OK


def cmd_threshold(args) -> int:
    df = args.df
    if df is None:
        if args.config is None:
            raise MolAuthError("give --df or a --config to derive it from")
        cfg = _config(args)
        df = cfg.df_mode.degrees_of_freedom(cfg.tap_counts[0])
    _emit(format(compute_threshold(args.alpha, df), ".12g") + "\n", args.out)
    return EXIT_OK


def cmd_roc(args) -> int:
    cfg = _config(args)
    seed = cfg.seed if args.seed is None else args.seed
    trials = cfg.trials if args.trials is None else args.trials
    workers = cfg.workers if args.workers is None else args.workers
    out_dir = Path(args.out or "roc_out")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise _IOFailure(f"cannot create output directory {out_dir}: {exc}") from exc
    written = []
    for L, sigma2 in cfg.sweep():
        curve = run_roc(cfg.scenario(L, sigma2), cfg.alphas, trials, seed, workers=workers)
        name = roc_filename(L, sigma2)
        _emit(csv_text(ROC_HEADER, roc_rows(curve)), str(out_dir / name))
        written.append(name)
        print(f"wrote {out_dir / name} (scenario {curve.scenario_digest})", file=sys.stderr)
    if args.plot_script:
        _emit(ROC_PLOT_SCRIPT.format(files=written), str(out_dir / "plot_roc.py"))
    return EXIT_OK


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="molauth",
        description="CIR-based transmitter authentication for diffusion molecular links.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI experiment configuration")
        p.add_argument("--seed", type=_u64, help="override run.seed")
        p.add_argument("--out", help="output path (directory for roc; default stdout)")
        p.add_argument("--plot-script", action="store_true",
                       help="also write a matplotlib script that plots the output")
        return p

    p = common(sub.add_parser("gen-cir", help="emit the received pulse and CIR taps as CSV"))
    p.add_argument("--tap-count", type=_positive_int)
    p.set_defaults(func=cmd_gen_cir)

    p = common(sub.add_parser("estimate", help="one end-to-end LS CIR estimation, as JSON"))
    p.add_argument("--frame-length", type=_positive_int, required=True,
                   help="number of training symbols")
    p.add_argument("--tap-count", type=_positive_int)
    p.add_argument("--sigma2", type=float, help="override noise.sigma2")
    p.set_defaults(func=cmd_estimate)

    p = common(sub.add_parser("threshold", help="Neyman-Pearson threshold for a false-alarm level"))
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--df", type=_positive_int, help="degrees of freedom (default: from config)")
    p.add_argument("--df-mode", choices=["L", "2L"], help="override test.df_mode")
    p.set_defaults(func=cmd_threshold)

    p = common(sub.add_parser("roc", help="Monte Carlo ROC curves, one CSV per (L, sigma2)"))
    p.add_argument("--trials", type=_positive_int, help="override run.trials")
    p.add_argument("--workers", type=_positive_int, help="override run.workers")
    p.add_argument("--df-mode", choices=["L", "2L"], help="override test.df_mode")
    p.set_defaults(func=cmd_roc)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"molauth: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MolAuthError as exc:
        print(f"molauth: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
