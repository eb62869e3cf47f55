"""Command-line interface.

Subcommands:
  run              simulate a configured scenario, write CSV + VTK outputs
  verify           run the verification battery, one JSON record per case
  skin-depth       fit the skin depth on the strip benchmark
  stability-probe  data-to-solution sensitivity ratios
  compare-freq     MF / HF / MF+HF triple with the ordering report

Exit code 0 iff every internal check of the invoked command passes.  All
outputs are deterministic; `--seedless` is accepted for interface parity (the
code contains no random number generator anywhere).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import verification
from .compare import compare_frequencies
from .config import load_config
from .driver import Simulation, stability_probe
from .eddy import compute_b
from .io import TimeSeries, write_timeseries_csv, write_vtk


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the INI config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")
    p.add_argument("--seedless", action="store_true",
                   help="reserved; no RNG exists anywhere in this tool")


def _write_run_outputs(sim: Simulation, res, outdir: Path, prefix: str = "") -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = outdir / f"{prefix}series.csv"
    write_timeseries_csv(TimeSeries(header=res.header, rows=res.rows), csv_path)
    written.append(csv_path)
    for i, snap in enumerate(res.snapshots):
        p1 = outdir / f"{prefix}workpiece_{i:04d}.vtk"
        write_vtk(sim.sub, p1,
                  point_fields={"theta": snap.theta, "z": snap.z},
                  title=f"workpiece fields t={snap.t:.9g}")
        b = compute_b(sim.mesh, snap.a)
        p2 = outdir / f"{prefix}domain_{i:04d}.vtk"
        write_vtk(sim.mesh, p2,
                  point_fields={"A": snap.a},
                  cell_fields={"B_mag": np.hypot(b[:, 0], b[:, 1]),
                               "joule_avg": snap.qbar_tri,
                               "region": sim.mesh.region.astype(float)},
                  title=f"domain fields t={snap.t:.9g}")
        written.extend([p1, p2])
    return written


def cmd_run(args) -> int:
    cfg = load_config(args.config).run_config()
    sim = Simulation(cfg)
    res = sim.run(quiet=args.quiet)
    outdir = Path(args.out)
    _write_run_outputs(sim, res, outdir)
    bm = verification.bounds_and_monotonicity_report(res)
    audit = verification.dissipation_audit(res.records, cfg.kinetics, sim.thermal_ops)
    report = {"bounds": bm, "dissipation": audit,
              "passed": bool(bm["passed"] and audit["passed"])}
    (outdir / "run_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if not args.quiet:
        print(json.dumps(report, sort_keys=True))
    return 0 if report["passed"] else 1


def cmd_verify(args) -> int:
    tooth_cfg = None
    if args.full:
        if not args.config:
            print("verify --full needs --config with root/tip regions", file=sys.stderr)
            return 2
        tooth_cfg = load_config(args.config).run_config()
    cases = verification.run_battery(tooth_cfg=tooth_cfg)
    ok = True
    lines = []
    for case in cases:
        lines.append(json.dumps(case, sort_keys=True))
        ok = ok and case["pass"]
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "verify_report.jsonl").write_text(text)
    return 0 if ok else 1


def cmd_skin_depth(args) -> int:
    rep = verification.skin_depth_case(args.frequency, args.sigma, args.mu)
    record = {
        "name": "skin_depth_fit",
        "frequency": rep.f,
        "delta_analytic": rep.delta_analytic,
        "delta_fitted": rep.delta_fitted,
        "relative_error": rep.relative_error,
        "threshold": 0.05,
        "pass": rep.relative_error <= 0.05,
    }
    print(json.dumps(record, sort_keys=True))
    return 0 if record["pass"] else 1


def cmd_stability(args) -> int:
    cfg = load_config(args.config).run_config()
    ok = True
    for eps in args.eps:
        rep = stability_probe(cfg, eps)
        rep["pass"] = bool(0.5 <= rep["ratio"] <= 2.0)
        ok = ok and rep["pass"]
        print(json.dumps(rep, sort_keys=True))
    return 0 if ok else 1


def cmd_compare(args) -> int:
    conf = load_config(args.config)
    cfg = conf.run_config()
    report, results = compare_frequencies(cfg, combined_scale=conf.compare_scale,
                                          quiet=args.quiet)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, (sim, res) in results.items():
        write_timeseries_csv(TimeSeries(header=res.header, rows=res.rows),
                             outdir / f"{name}_series.csv")
        write_vtk(sim.sub, outdir / f"{name}_final.vtk",
                  point_fields={"theta": res.state.theta, "z": res.state.z},
                  title=f"{name} final workpiece fields")
    (outdir / "compare_report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(json.dumps(report, sort_keys=True))
    return 0 if report["passed"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="induction2d",
                                     description="2D multifrequency induction "
                                                 "hardening simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured simulation")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify", help="run the verification battery")
    p_ver.add_argument("--out", default=None)
    p_ver.add_argument("--config", default=None)
    p_ver.add_argument("--full", action="store_true",
                       help="include the frequency-selectivity triple")
    p_ver.add_argument("--quiet", action="store_true")
    p_ver.add_argument("--seedless", action="store_true")
    p_ver.set_defaults(func=cmd_verify)

    p_skin = sub.add_parser("skin-depth", help="skin-depth benchmark")
    p_skin.add_argument("--frequency", type=float, default=1e4)
    p_skin.add_argument("--sigma", type=float, default=1e6)
    p_skin.add_argument("--mu", type=float, default=4e-7 * np.pi)
    p_skin.add_argument("--quiet", action="store_true")
    p_skin.add_argument("--seedless", action="store_true")
    p_skin.set_defaults(func=cmd_skin_depth)

    p_st = sub.add_parser("stability-probe", help="sensitivity ratio probe")
    p_st.add_argument("--config", required=True)
    p_st.add_argument("--eps", type=float, nargs="+", default=[1e-2, 1e-3])
    p_st.add_argument("--quiet", action="store_true")
    p_st.add_argument("--seedless", action="store_true")
    p_st.set_defaults(func=cmd_stability)

    p_cmp = sub.add_parser("compare-freq", help="MF / HF / MF+HF comparison")
    _add_common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
