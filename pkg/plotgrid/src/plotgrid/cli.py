"""plotgrid command line: render an experiment CSV as a panel grid.

Note: the +-1 std band is drawn only for the avg_replaced metric; the
frac_changed column is a per-cell proportion whose CSV carries no
per-election spread, so no band is shown there.
"""

from __future__ import annotations

import argparse
import sys

from . import METRICS, PlotSpec, render_grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotgrid", description=__doc__)
    parser.add_argument("--csv", required=True, help="experiment records CSV")
    parser.add_argument("--metric", required=True, choices=METRICS)
    parser.add_argument("--out", required=True, help="output image path (e.g. grid.png)")
    parser.add_argument(
        "--rule-order",
        default="av,greedycc,greedypav,phragmen",
        help="comma-separated column order; unknown rules in the data are appended",
    )
    parser.add_argument(
        "--phi-order",
        default="",
        help="comma-separated row order; defaults to ascending values from the data",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        csv_path=args.csv,
        metric=args.metric,
        out_path=args.out,
        rule_order=tuple(tok.strip() for tok in args.rule_order.split(",") if tok.strip()),
        phi_order=tuple(float(tok) for tok in args.phi_order.split(",") if tok.strip()),
    )
    try:
        render_grid(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
