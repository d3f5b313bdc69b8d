"""Command-line entry point for the experiment runner.

Exit codes: 0 on success, 2 on a configuration error, 3 when a run hits
the densification/memory budget.
"""

from __future__ import annotations

import argparse
import sys

from .errors import BudgetExceededError
from .experiments import (
    EXPERIMENTS,
    default_config,
    render,
    run_experiment,
)


def _parse_n(text: str):
    """Mode size: a fixed int like ``16`` or a range like ``5:20``."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        low, high = int(lo), int(hi)
        if not 1 <= low <= high:
            raise argparse.ArgumentTypeError(f"bad size range {text!r}")
        return (low, high)
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"mode size must be positive, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttbeam",
        description=(
            "Seeded experiments for beam-based min/max search over tensor "
            "trains; emits CSV or JSON tables."
        ),
    )
    parser.add_argument(
        "--experiment",
        required=True,
        choices=EXPERIMENTS,
        help="which study to run",
    )
    parser.add_argument(
        "--d",
        type=int,
        nargs="+",
        default=None,
        help="tensor dimension(s); random-small iterates over all given values",
    )
    parser.add_argument(
        "--n",
        type=_parse_n,
        default=None,
        help="mode size: fixed (e.g. 16) or a range to draw from (e.g. 5:20)",
    )
    parser.add_argument(
        "--rank",
        type=int,
        nargs="+",
        default=None,
        help="train rank(s); random-small iterates over all given values",
    )
    parser.add_argument("--k", type=int, default=None, help="beam width (default 100)")
    parser.add_argument(
        "--reps", type=int, default=None, help="repetitions per cell/trial count"
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument(
        "--bidir",
        action="store_true",
        help="sweep from both ends and keep the better candidate",
    )
    parser.add_argument(
        "--join-j",
        type=int,
        default=0,
        help="merge the first j modes before searching (0 disables)",
    )
    parser.add_argument(
        "--benchmark",
        nargs="+",
        default=None,
        help="restrict func-small/func-big to the named benchmark functions",
    )
    parser.add_argument(
        "--out", default=None, help="output file (default: standard output)"
    )
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    overrides = {"seed": args.seed, "bidirectional": args.bidir, "join_j": args.join_j}
    if args.d is not None:
        overrides["d"] = tuple(args.d)
    if args.n is not None:
        overrides["n"] = args.n
    if args.rank is not None:
        overrides["rank"] = tuple(args.rank)
    if args.k is not None:
        overrides["k"] = args.k
    if args.reps is not None:
        overrides["reps"] = args.reps

    try:
        cfg = default_config(args.experiment, **overrides)
        rows = run_experiment(cfg, functions=args.benchmark)
        text = render(args.experiment, rows, cfg, args.format)
    except BudgetExceededError as exc:
        print(f"ttbeam: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"ttbeam: configuration error: {exc}", file=sys.stderr)
        return 2

    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
