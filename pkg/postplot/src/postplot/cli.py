"""Batch CLI: render snapshot heatmaps or time-series plots to PNG."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import PlotJob, render_snapshot, render_timeseries


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="postplot",
                                     description="render induction2d outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_snap = sub.add_parser("snapshot", help="heatmaps from VTK snapshots")
    p_snap.add_argument("--in", dest="indir", required=True)
    p_snap.add_argument("--out", dest="outdir", required=True)
    p_snap.add_argument("--field", default="z", help="theta or z (default z)")
    p_snap.add_argument("--times", default=None,
                        help="comma-separated snapshot times (default: all)")
    p_snap.add_argument("--range", default=None,
                        help="fixed color range 'lo,hi' (default: data extrema)")

    p_ser = sub.add_parser("series", help="line plot from the CSV time series")
    p_ser.add_argument("--in", dest="indir", required=True)
    p_ser.add_argument("--out", dest="outdir", required=True)
    p_ser.add_argument("--csv", default="series.csv",
                       help="CSV file name inside --in")
    p_ser.add_argument("--columns", required=True,
                       help="comma-separated column names")

    args = parser.parse_args(argv)
    if args.command == "snapshot":
        times = None
        if args.times:
            times = tuple(float(tok) for tok in args.times.split(","))
        crange = None
        if args.range:
            lo, hi = args.range.split(",")
            crange = (float(lo), float(hi))
        job = PlotJob(indir=Path(args.indir), field=args.field, times=times,
                      color_range=crange, outdir=Path(args.outdir))
        images = render_snapshot(job)
        for img in images:
            print(f"wrote {img.path} (clim {img.clim[0]:.6g}..{img.clim[1]:.6g})")
        return 0
    if args.command == "series":
        csv_path = Path(args.indir) / args.csv
        out = Path(args.outdir) / (csv_path.stem + ".png")
        ranges = render_timeseries(csv_path, args.columns.split(","), out)
        for name, (lo, hi) in ranges.items():
            print(f"{name}: [{lo:.6g}, {hi:.6g}]")
        print(f"wrote {out}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
