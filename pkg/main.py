#!/usr/bin/env python3
"""
L1 Spline Smoothing - Main Entry Point
======================================

Robust smoothing, denoising and inpainting of regularly sampled grid data:
1. L2 splines solved with one DCT round trip
2. Bisquare-IRLS robust L2 splines
3. L1 splines solved by split-Bregman iteration

Setup:
    pip install -r requirements.txt

Commands:
    python main.py smooth data.csv -o out.csv --method l1 --gcv
    python main.py smooth --synthetic step-outliers --n 4096 --seed 7 --gcv -o out.csv --trace trace.csv
    python main.py generate step-outliers --n 4096 --seed 7 -o noisy.csv --truth clean.csv
    python main.py compare smooth-outliers --n 4096 --seed 1
    python main.py bench --sizes 16384 32768 65536 --breakdown

Environment Variables:
    L1SPLINE_EPS            - split-Bregman stopping threshold (1e-3)
    L1SPLINE_MAX_OUTER      - outer iteration cap (100)
    L1SPLINE_GCV_POINTS     - points of the log10(s) GCV grid (61)
    L1SPLINE_LOG_LEVEL      - logging level (WARNING)
"""

import argparse
import logging
import sys

import numpy as np
from pydantic import ValidationError

from src.config import JobConfig, SolverDefaults
from src.formats import GridFile, write_grid
from src.formats.text import parse_shape
from src.runner import EXIT_ERROR, bench, bench_breakdown, compare, run
from src.synthetic import PRESETS, generate_synthetic, preset
from src.types import FormatError, Method


def build_parser(defaults: SolverDefaults) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Robust spline smoothing and inpainting of grid data.",
    )
    parser.add_argument("--log-level", default=defaults.log_level,
                        help="logging level (default: %(default)s)")
    commands = parser.add_subparsers(dest="command", required=True)

    smooth = commands.add_parser("smooth", help="smooth one grid file or synthetic preset")
    smooth.add_argument("input", nargs="?", help="CSV, grid text or PGM file")
    smooth.add_argument("--synthetic", choices=sorted(PRESETS), help="use a bundled generator instead of a file")
    smooth.add_argument("--n", type=int, help="size per axis for --synthetic")
    smooth.add_argument("--seed", type=int, default=0, help="generator seed for --synthetic")
    smooth.add_argument("--method", choices=[m.value for m in Method], default=Method.L1.value)
    smooth.add_argument("--mask", help="0/1 mask file in any grid format")
    smooth.add_argument("--shape", help="row-major shape of a CSV input, e.g. 64x64")
    group = smooth.add_mutually_exclusive_group(required=True)
    group.add_argument("--s", type=float, help="smoothing parameter")
    group.add_argument("--gcv", action="store_true", help="select s by GCV on the robust L2 problem")
    smooth.add_argument("--gcv-range", type=float, nargs=2, metavar=("LO", "HI"),
                        help="log10(s) search interval")
    smooth.add_argument("--gcv-points", type=int)
    smooth.add_argument("--lambda", dest="lam", type=float, help="split-Bregman penalty (default min(s, 1))")
    smooth.add_argument("--eps", type=float)
    smooth.add_argument("--max-outer", type=int)
    smooth.add_argument("--inner-iters", type=int)
    smooth.add_argument("--irls-rounds", type=int)
    smooth.add_argument("--window", type=int, help="sliding window along axis 0 for 3-D frame stacks")
    smooth.add_argument("-o", "--output", required=True)
    smooth.add_argument("--trace", help="write iter,rel_change lines here")
    smooth.add_argument("--weights-out", help="write final robust weights (robust-l2)")

    generate = commands.add_parser("generate", help="write a synthetic corrupted instance")
    generate.add_argument("preset", choices=sorted(PRESETS))
    generate.add_argument("--n", type=int)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--sigma", type=float)
    generate.add_argument("--outlier-fraction", type=float)
    generate.add_argument("-o", "--output", required=True)
    generate.add_argument("--truth", help="also write the clean ground truth")
    generate.add_argument("--mask-out", help="also write the 0/1 observation mask")

    comp = commands.add_parser("compare", help="RMSE of l2, robust l2 and l1 on a synthetic preset")
    comp.add_argument("preset", choices=sorted(PRESETS))
    comp.add_argument("--n", type=int)
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--s", type=float, help="shared s (default: GCV on robust L2)")

    bench_cmd = commands.add_parser("bench", help="time one outer iteration for several sizes")
    bench_cmd.add_argument("--sizes", type=int, nargs="+",
                           default=[2 ** k for k in range(14, 21)])
    bench_cmd.add_argument("--repeats", type=int, default=5)
    bench_cmd.add_argument("--breakdown", action="store_true",
                           help="also print the time share of DCT/IDCT, shrink and update steps")
    return parser


def _preset_spec(args):
    overrides = {"seed": args.seed}
    if args.n is not None:
        overrides["shape"] = (args.n,) * len(PRESETS[args.preset].shape)
    if getattr(args, "sigma", None) is not None:
        overrides["sigma"] = args.sigma
    if getattr(args, "outlier_fraction", None) is not None:
        overrides["outlier_fraction"] = args.outlier_fraction
    return preset(args.preset, **overrides)


def cmd_smooth(args, defaults: SolverDefaults) -> int:
    config = JobConfig.with_defaults(
        defaults,
        method=Method(args.method),
        input_path=args.input,
        synthetic=args.synthetic,
        n=args.n,
        seed=args.seed,
        mask_path=args.mask,
        shape=parse_shape(args.shape) if args.shape else None,
        s=args.s,
        gcv=args.gcv,
        gcv_log10_range=tuple(args.gcv_range) if args.gcv_range else None,
        gcv_points=args.gcv_points,
        lam=args.lam,
        eps=args.eps,
        max_outer=args.max_outer,
        inner_iters=args.inner_iters,
        irls_rounds=args.irls_rounds,
        window=args.window,
        output_path=args.output,
        trace_path=args.trace,
        weights_path=args.weights_out,
    )
    return run(config)


def cmd_generate(args) -> int:
    sample = generate_synthetic(_preset_spec(args))
    fmt = "csv" if sample.observation.ndim == 1 else "grid"
    write_grid(args.output, GridFile(data=sample.observation, fmt=fmt))
    if args.truth:
        write_grid(args.truth, GridFile(data=sample.truth, fmt=fmt))
    if args.mask_out:
        write_grid(args.mask_out, GridFile(data=sample.mask.astype(np.float64), fmt=fmt))
    print(f"Wrote {sample.observation.size} samples ({int(sample.outliers.sum())} outliers, "
          f"{int((~sample.mask).sum())} missing) to {args.output}")
    return 0


def cmd_compare(args, defaults: SolverDefaults) -> int:
    # Placeholder paths: compare writes nothing
    config = JobConfig.with_defaults(
        defaults, method=Method.L1, synthetic=args.preset, s=args.s, gcv=args.s is None,
        output_path="-",
    )
    table = compare(_preset_spec(args), config, s=args.s)

    print(f"\n=== {args.preset} (s = {table.s:.6g}) ===\n")
    print(f"{'Method':<15} {'RMSE':>10} {'Iters':>6} {'Control':>8}")
    for row in table.rows:
        iters = "-" if row.iterations is None else str(row.iterations)
        control = "-" if row.control_points is None else str(row.control_points)
        print(f"{row.method:<15} {row.rmse:>10.5f} {iters:>6} {control:>8}")
    print(f"\nBest: {table.best().method}")
    return 0


def cmd_bench(args) -> int:
    print(f"\n{'n':>9} {'sec/iter':>12} {'ratio':>7}")
    previous = None
    for n, seconds in bench(args.sizes, repeats=args.repeats):
        ratio = "-" if previous is None else f"{seconds / previous:.2f}"
        print(f"{n:>9} {seconds:>12.6f} {ratio:>7}")
        previous = seconds

    if args.breakdown:
        print(f"\n{'n':>9} {'dct/idct':>9} {'shrink':>7} {'update':>7}")
        for n, times in bench_breakdown(args.sizes):
            shares = times.shares()
            print(f"{n:>9} {shares['transform']:>9.1%} {shares['shrink']:>7.1%} {shares['update']:>7.1%}")
    return 0


def configure_logging(level_name: str):
    level = logging.getLevelName(level_name.upper())
    if not isinstance(level, int):
        raise ValueError(f"unknown log level '{level_name}'")
    logging.basicConfig(level=level, format="[%(name)s] %(message)s")


def main(argv=None) -> int:
    """Main entry point."""
    defaults = SolverDefaults.from_env()
    args = build_parser(defaults).parse_args(argv)

    try:
        configure_logging(args.log_level)
        if args.command == "smooth":
            return cmd_smooth(args, defaults)
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "compare":
            return cmd_compare(args, defaults)
        return cmd_bench(args)
    except (ValidationError, FormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
