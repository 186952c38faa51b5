"""Command-line front end for figure regeneration.

Consumes only the CSV/JSON artifacts emitted by the core package.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import plots


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="sgfluxon-figures", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("render-density", help="field grid to a density panel")
    sp.add_argument("csv")
    sp.add_argument("sidecar")
    sp.add_argument("out")
    sp.add_argument("--field", default="cos_u", choices=("cos_u", "cos_half", "sin_half"))
    sp.add_argument("--poles", default=None, help="pole table CSV for overlays")
    sp.add_argument("--map-catastrophe", default=None,
                    help="catastrophe JSON for the tau -> (x,t) overlay map")
    sp.add_argument("--epsilon", type=float, default=None,
                    help="epsilon for the overlay map (with --map-catastrophe)")
    sp.add_argument("--zero-contour", action="store_true")

    sp = sub.add_parser("render-h-field", help="h grid to a Re(h) panel")
    sp.add_argument("csv")
    sp.add_argument("out")
    sp.add_argument("--poles", default=None)
    sp.add_argument("--squash", type=float, default=10.0)

    sp = sub.add_parser("render-catalog", help="defect tiles to a catalog sheet")
    sp.add_argument("out")
    sp.add_argument("--tile", nargs=2, action="append", metavar=("CSV", "SIDECAR"),
                    required=True, help="repeat per Omega column")

    args = ap.parse_args(argv)
    if args.command == "render-density":
        pole_map = None
        if args.map_catastrophe:
            with open(args.map_catastrophe) as fh:
                cat = json.load(fh)
            if args.epsilon is None:
                ap.error("--map-catastrophe needs --epsilon")
            pole_map = {"a": cat["a"], "b": cat["b"], "t_gc": cat["t_gc"],
                        "epsilon": args.epsilon}
        plots.render_density(
            args.csv, args.sidecar, args.out, field=args.field,
            poles_csv=args.poles, pole_map=pole_map, zero_contour=args.zero_contour,
        )
    elif args.command == "render-h-field":
        plots.render_h_field(args.csv, args.out, poles_csv=args.poles, squash=args.squash)
    elif args.command == "render-catalog":
        plots.render_catalog([tuple(t) for t in args.tile], args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
