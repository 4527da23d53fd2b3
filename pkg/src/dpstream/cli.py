"""Command line entry point: ``dpstream synth --input PATH ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from .graph import ParseError
from .metrics import METRICS
from .pipeline import VARIANTS, ConfigError, RunConfig, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpstream")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("synth", help="synthesize a private stream and score it")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["temporal", "snapshots"], default="temporal")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--threshold-mult", type=float, default=1.0)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=sorted(VARIANTS), default="psgraph")
    p.add_argument("--metrics", default=",".join(METRICS),
                   help="comma-separated subset of " + ",".join(METRICS))
    p.add_argument("--out", required=True)
    p.add_argument("--emit-graphs", metavar="DIR")
    p.add_argument("--group-size", type=int, default=20)
    p.add_argument("--eps-e-cap", type=float, default=0.01)
    p.add_argument("--bucket-width", type=int,
                   help="bucket raw timestamps into fixed-width windows")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--noiseless", action="store_true",
                   help="zero all Laplace noise (debug only; requires --unsafe-debug)")
    p.add_argument("--unsafe-debug", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.noiseless and not args.unsafe_debug:
        print("error: --noiseless produces non-private output; add --unsafe-debug to confirm",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = RunConfig(
            input=args.input, format=args.format, epsilon=args.epsilon, window=args.window,
            threshold_mult=args.threshold_mult, repeats=args.repeats, seed=args.seed,
            variant=args.variant,
            metrics=tuple(m.strip() for m in args.metrics.split(",") if m.strip()),
            out=args.out, emit_graphs=args.emit_graphs, noiseless=args.noiseless,
            group_size=args.group_size, eps_e_cap=args.eps_e_cap,
            bucket_width=args.bucket_width, jobs=args.jobs,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_experiment(cfg)
    except ParseError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc.filename or args.input}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    for name, (mean, std) in report.aggregate().items():
        print(f"{name:18s} {mean:.6g} +/- {std:.3g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
