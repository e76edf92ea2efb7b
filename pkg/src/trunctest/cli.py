"""Command line entry point: ``trunctest <mode> [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from .distributions import ProblemParams
from .harness import ConfigError, ExperimentConfig, _jsonable, check_writable, run_experiment, write_result


def _alpha(text: str):
    if text == "calibrated":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"alpha must be a number or 'calibrated', got {text!r}")


def _eps(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"eps must be a rational like 1/2, got {text!r}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    p.add_argument("--k", type=int, required=True, help="junta arity")
    p.add_argument("--eps", type=_eps, default=Fraction(1, 2), help="distance parameter, e.g. 1/2")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--source", default="uniform",
                   help="uniform | junta:<file> | junta:random | parity:<i,j,...> | parity:random")
    p.add_argument("--out", default=None, help="per-trial output file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--c2", type=float, default=4.0, help="constant in the T2 budget")
    p.add_argument("--alpha", type=_alpha, default="calibrated",
                   help="collision threshold constant or 'calibrated'")
    p.add_argument("--amplify", choices=("none", "median"), default="none")
    p.add_argument("--calib-trials", type=int, default=100_000)
    p.add_argument("--T", type=int, default=None, help="sample count for lower-bound modes")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record elapsed_ns (breaks byte-identical output)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="trunctest", description="Junta truncation testers and lower-bound experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("consistent", parents=[common], help="consistent-junta checker")
    sub.add_parser("uniformity", parents=[common], help="junta-uniformity tester")
    sub.add_parser("calibrate", parents=[common], help="calibrate the collision threshold")
    lb = sub.add_parser("lowerbound", help="lower-bound experiments")
    lbsub = lb.add_subparsers(dest="lbcommand", required=True)
    lbsub.add_parser("moments", parents=[common], help="moments of the dual weight count")
    lbsub.add_parser("mle", parents=[common], help="failure rate of the likelihood distinguisher")
    return parser


def config_from_args(args) -> ExperimentConfig:
    mode = f"lowerbound-{args.lbcommand}" if args.command == "lowerbound" else args.command
    try:
        params = ProblemParams(args.n, args.k, args.eps)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return ExperimentConfig(
        mode=mode,
        params=params,
        trials=args.trials,
        master_seed=args.seed,
        c2=args.c2,
        alpha=args.alpha,
        amplify=args.amplify,
        source=args.source,
        T=args.T,
        calib_trials=args.calib_trials,
        threads=args.threads,
        timing=args.timing,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.out is not None:
            check_writable(args.out)
        result = run_experiment(cfg)
        if args.out is not None:
            write_result(result, args.out, args.format)
    except ConfigError as e:
        print(f"trunctest: refused: {e}", file=sys.stderr)
        return 2
    json.dump(_jsonable(result.summary), sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
