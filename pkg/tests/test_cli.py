"""Command-line surface: argument handling, outputs, exit-code semantics."""
import json

import pytest

from induction2d import cli

MINI = """\
[domain]
box = 0 0 0.05 0.009
workpiece_polygon = 0.025 0  0.05 0  0.05 0.009  0.025 0.009
coil_polygon_1 = 0.004 0  0.01 0  0.01 0.009  0.004 0.009
mesh_h = 0.003
symmetry_sides = top bottom
refine_depth = 0.005
refine_levels = 1

[time]
t_end = 0.02
dt_coarse = 0.01

[output]
probe_points = 0.026 0.0045
region_root = 0.026 0 0.035 0.009
region_tip = 0.045 0 0.05 0.009
snapshot_times = 0.02
"""


@pytest.fixture()
def mini_cfg(tmp_path):
    p = tmp_path / "mini.ini"
    p.write_text(MINI)
    return p


def test_run_writes_outputs_and_passes(mini_cfg, tmp_path):
    out = tmp_path / "out"
    rc = cli.main(["run", "--config", str(mini_cfg), "--out", str(out),
                   "--quiet", "--seedless"])
    assert rc == 0
    names = {p.name for p in out.iterdir()}
    assert "series.csv" in names
    assert "run_report.json" in names
    assert "workpiece_0000.vtk" in names and "domain_0000.vtk" in names
    report = json.loads((out / "run_report.json").read_text())
    assert report["passed"] is True
    header = (out / "series.csv").read_text().splitlines()[0].split(",")
    assert "theta_probe_0" in header and "z_int_root" in header


def test_verify_reports_one_json_line_per_case(monkeypatch, capsys, tmp_path):
    canned = [
        {"name": "a", "metric": 0.0, "threshold": 1.0, "sense": "<=", "pass": True},
        {"name": "b", "metric": 2.0, "threshold": 1.0, "sense": "<=", "pass": False},
    ]
    monkeypatch.setattr(cli.verification, "run_battery",
                        lambda tooth_cfg=None: canned)
    rc = cli.main(["verify", "--out", str(tmp_path)])
    assert rc == 1  # one failing case fails the command
    lines = capsys.readouterr().out.strip().splitlines()
    assert [json.loads(ln)["name"] for ln in lines] == ["a", "b"]
    saved = (tmp_path / "verify_report.jsonl").read_text().strip().splitlines()
    assert len(saved) == 2


def test_skin_depth_subcommand(capsys):
    rc = cli.main(["skin-depth", "--frequency", "1e4", "--sigma", "1e6"])
    assert rc == 0
    record = json.loads(capsys.readouterr().out.strip())
    assert record["pass"] is True
    assert record["relative_error"] <= 0.05


def test_stability_probe_subcommand(mini_cfg, capsys):
    rc = cli.main(["stability-probe", "--config", str(mini_cfg),
                   "--eps", "1e-2"])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc in (0, 1)
    rep = json.loads(out[0])
    assert "ratio" in rep and "D" in rep


def test_compare_freq_subcommand(mini_cfg, tmp_path, capsys):
    out = tmp_path / "cmp"
    rc = cli.main(["compare-freq", "--config", str(mini_cfg), "--out", str(out),
                   "--quiet"])
    report = json.loads((out / "compare_report.json").read_text())
    assert rc == (0 if report["passed"] else 1)
    names = {p.name for p in out.iterdir()}
    for run in ("mf", "hf", "mf_hf"):
        assert f"{run}_series.csv" in names
        assert f"{run}_final.vtk" in names
    assert "thresholds" in report and "integrals" in report
