"""Command line figure generation from solver output files.

    dgplots convergence k5.csv k20.csv --kind error --out conv.png
    dgplots mesh snaps/mesh_0008.txt --values snaps/estimate_0008.csv \
        --column eta_check --out mesh.png
    dgplots sizes history.csv --out sizes.png

Reads the history CSV, mesh snapshot, and estimator CSV formats
written by helmdg run and writes image files.  Nothing is recomputed.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

from . import figures
from .io import read_estimate

_VALUE_COLUMNS = ("eta_r", "eta_e", "eta_j", "eta", "eta_check", "osc")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dgplots",
        description="Figures from helmdg history CSVs and mesh snapshots.")
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convergence",
                          help="per-step convergence curves")
    conv.add_argument("histories", nargs="+", metavar="CSV")
    conv.add_argument("--kind", choices=figures.CONVERGENCE_KINDS,
                      default="error")
    conv.add_argument("--x", choices=("step", "dofs"), default="step",
                      help="abscissa: refinement step or DOF count")
    conv.add_argument("--label", action="append", default=None,
                      help="series label, once per history")
    conv.add_argument("--out", required=True, help="image file to write")

    mesh = sub.add_parser("mesh", help="wireframe or heatmap of a snapshot")
    mesh.add_argument("mesh", metavar="MESHFILE")
    mesh.add_argument("--values", default=None, metavar="CSV",
                      help="per-element estimator CSV for a heatmap")
    mesh.add_argument("--column", choices=_VALUE_COLUMNS,
                      default="eta_check",
                      help="which estimator column to color by")
    mesh.add_argument("--out", required=True, help="image file to write")

    size = sub.add_parser("sizes",
                          help="h_max, h_min and their ratio per step")
    size.add_argument("history", metavar="CSV")
    size.add_argument("--out", required=True, help="image file to write")
    return parser


def run_command(args):
    if args.command == "convergence":
        figures.plot_convergence(args.histories, kind=args.kind, x=args.x,
                                 labels=args.label, out=args.out)
    elif args.command == "mesh":
        values = None
        label = None
        if args.values is not None:
            est = read_estimate(args.values)
            values = getattr(est, args.column)
            label = args.column
        figures.plot_mesh(args.mesh, values=values, value_label=label,
                          out=args.out)
    else:
        figures.plot_size_history(args.history, out=args.out)
    print(f"wrote {args.out}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run_command(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
