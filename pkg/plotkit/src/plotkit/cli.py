"""Command-line figure rendering over a directory of experiment CSVs."""

from __future__ import annotations

import argparse
import sys

from plotkit.aggregate import FigureSpec, SeriesError
from plotkit.render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit")
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="render one metric figure from logged CSVs")
    plot.add_argument("--in", dest="in_dir", required=True)
    plot.add_argument("--metric", choices=("T", "C"), required=True)
    plot.add_argument("--algos", required=True, help="comma-separated series names")
    plot.add_argument("--smooth", type=int, default=5)
    plot.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        metric=args.metric,
        algos=[a for a in args.algos.split(",") if a],
        smoothing=args.smooth,
        out=args.out,
    )
    try:
        path = render(args.in_dir, spec)
    except (SeriesError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
