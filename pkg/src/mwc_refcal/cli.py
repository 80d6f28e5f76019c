"""mwc-refcal command line interface.

Subcommands: coeffs (dump a coefficient window as CSV), simulate (one
channel trace + JSON summary), refvolt (Monte Carlo threshold as JSON),
sweep (the full N x q experiment: CSV rows, JSON summary, optional
figure), check (self-check suites).  Exit codes: 0 success, 1 invalid
configuration, 2 runtime failure (for `check`, any failed suite).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .channel import RecordWindow, simulate_channel
from .checks import (
    ALIGNMENT_TRIALS,
    CLT_TRIALS,
    PHASE_SAMPLES,
    run_all_checks,
)
from .harness import (
    ExperimentConfig,
    format_float,
    load_config,
    mean_ratio,
    run_sweep,
    sweep_summary,
    write_sweep_csv,
    write_sweep_json,
)
from .mixing import draw_chips, fourier_coeffs
from .numerics import InvalidInput, RngStream
from .refvolt import mc_refvolt


def _add_config_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to a key = value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwc-refcal",
        description="Sampling-stage simulation and quantizer reference-voltage "
        "calibration for the modulated wideband converter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="dump a Fourier coefficient window as CSV")
    p.add_argument("--M", type=int, required=True, dest="n_chips", help="chips per period")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--l-start", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--csv", default=None, help="output path (default: stdout)")

    p = sub.add_parser("simulate", help="simulate one channel")
    _add_config_arg(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--N", type=int, default=1, help="number of band pairs (default 1)")
    p.add_argument("--trace", default=None, help="write the dense output as CSV (t,y)")
    p.add_argument("--json", default=None, help="write the run summary as JSON")

    p = sub.add_parser("refvolt", help="Monte Carlo reference-voltage estimate")
    _add_config_arg(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials", type=int, default=None, help="default: config value")
    p.add_argument("--p0", type=float, default=None, help="default: config value")
    p.add_argument("--seed", type=int, default=None, help="default: config value")
    p.add_argument("--json", default=None, help="write the estimate as JSON")
    p.add_argument(
        "--include-maxima",
        action="store_true",
        help="include the per-trial maxima in the JSON output",
    )

    p = sub.add_parser("sweep", help="run the N x q threshold sweep")
    _add_config_arg(p)
    p.add_argument("--fast", action="store_true", help="500 trials on a 2 us record")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json", required=True)
    p.add_argument("--out-fig", default=None, help="also render the sweep figure")
    p.add_argument(
        "--ratio-include-q1",
        action="store_true",
        help="include q = 1 cells in the ratio means",
    )

    p = sub.add_parser("check", help="run the self-check suites")
    _add_config_arg(p)
    p.add_argument("--alignment-trials", type=int, default=ALIGNMENT_TRIALS)
    p.add_argument("--phase-samples", type=int, default=PHASE_SAMPLES)
    p.add_argument("--clt-trials", type=int, default=CLT_TRIALS)
    return parser


def _cmd_coeffs(args) -> int:
    chips = draw_chips(args.n_chips, RngStream(args.seed, 0), fp=1.0)
    window = fourier_coeffs(chips, args.l_start, args.count)
    lines = ["l,re,im,abs,arg"]
    for l, c in zip(window.indices(), window.coeffs):
        lines.append(
            ",".join(
                [
                    str(int(l)),
                    format_float(c.real),
                    format_float(c.imag),
                    format_float(abs(c)),
                    format_float(float(np.angle(c))),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    cfg = config.mwc_config(args.q)
    spec = config.build_spec(args.N)
    chips = draw_chips(cfg.n_chips, RngStream(args.seed, 0), cfg.fp)
    out = simulate_channel(spec, chips, cfg, config.record)
    if args.trace:
        t = out.y_dense.times()
        with open(args.trace, "w", newline="") as fh:
            fh.write("t,y\n")
            for ti, yi in zip(t, out.y_dense.values):
                fh.write(f"{format_float(ti)},{format_float(yi)}\n")
    summary = {
        "peak": out.peak,
        "peak_time": out.peak_time,
        "raw_peak": out.raw_peak,
        "fs": cfg.fs,
        "fp": cfg.fp,
        "q": cfg.q,
        "seed": args.seed,
    }
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_refvolt(args) -> int:
    config = load_config(args.config)
    trials = args.trials if args.trials is not None else config.trials
    p0 = args.p0 if args.p0 is not None else config.p0
    seed = args.seed if args.seed is not None else config.seed
    est = mc_refvolt(
        spec=config.build_spec(args.N),
        cfg=config.mwc_config(args.q),
        trials=trials,
        p0=p0,
        seed=seed,
        record=config.record,
    )
    payload = {
        "trials": est.trials,
        "p0": est.p0,
        "y_th": est.y_th,
        "prediction": est.prediction,
        "env_max": est.env_max,
        "sigma": est.sigma,
        "q": est.q,
        "N": est.n_bands,
        "t0": est.t0,
        "seed": est.seed,
        "degenerate": est.degenerate,
    }
    if args.include_maxima:
        payload["maxima"] = [float(v) for v in est.maxima]
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.fast:
        config = config.fast()
    result = run_sweep(config, workers=args.workers)
    write_sweep_csv(result.rows, args.out_csv)
    write_sweep_json(config, result, args.out_json)
    if args.out_fig:
        from .plotting import render_sweep_figure

        render_sweep_figure(result.rows, args.out_fig)
    try:
        ratios = mean_ratio(result.rows, include_q1=args.ratio_include_q1)
        ratio_text = ", ".join(f"N={n}: {r:.3f}" for n, r in ratios.items())
    except InvalidInput as exc:
        ratio_text = f"unavailable ({exc})"
    print(f"{len(result.rows)} rows -> {args.out_csv}")
    print(f"mean(y_th/sqrt(q)) ratios: {ratio_text}")
    for violation in result.violations:
        print(f"skipped cell: {violation}", file=sys.stderr)
    return 0


def _cmd_check(args) -> int:
    config = load_config(args.config)
    outcomes = run_all_checks(
        config,
        alignment_trials=args.alignment_trials,
        phase_samples=args.phase_samples,
        clt_trials=args.clt_trials,
    )
    failed = 0
    for outcome in outcomes:
        status = "PASS" if outcome.passed else "FAIL"
        print(f"{status} {outcome.name}: {outcome.detail}")
        failed += 0 if outcome.passed else 1
    return 0 if failed == 0 else 2


_COMMANDS = {
    "coeffs": _cmd_coeffs,
    "simulate": _cmd_simulate,
    "refvolt": _cmd_refvolt,
    "sweep": _cmd_sweep,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
