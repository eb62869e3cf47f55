"""Heatmap and time-series rendering for simulator outputs.

Strictly a display layer: the only computation is the triangulation
interpolation matplotlib performs while rasterizing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402
from matplotlib.tri import Triangulation  # noqa: E402

from .csvio import read_timeseries  # noqa: E402
from .vtkio import VtkGrid, read_vtk  # noqa: E402

FIELD_LABELS = {"theta": "temperature [K]", "z": "austenite fraction [-]"}


@dataclass
class PlotJob:
    """One batch of snapshot heatmaps sharing a field and a color scale."""

    indir: Path
    field: str
    times: tuple[float, ...] | None = None
    color_range: tuple[float, float] | None = None
    outdir: Path = field(default_factory=lambda: Path("."))


@dataclass
class RenderedImage:
    path: Path
    source: Path
    clim: tuple[float, float]


def _find_snapshots(indir: Path, field_name: str) -> list[tuple[Path, VtkGrid]]:
    out = []
    for path in sorted(Path(indir).glob("*.vtk")):
        grid = read_vtk(path)
        if field_name in grid.point_data or field_name in grid.cell_data:
            out.append((path, grid))
    return out


def _padded(lo: float, hi: float) -> tuple[float, float]:
    if hi > lo:
        return lo, hi
    pad = max(1e-12, abs(lo) * 1e-6)
    return lo - pad, hi + pad


def render_snapshot(job: PlotJob) -> list[RenderedImage]:
    """Render one filled-triangulation heatmap per snapshot.

    All images share one color scale: the job's explicit range, or the true
    extrema of the selected fields.  Returns the written images with the
    color limits actually used.
    """
    snaps = _find_snapshots(job.indir, job.field)
    if not snaps:
        raise FileNotFoundError(f"no VTK file in {job.indir} carries field {job.field!r}")
    if job.times is not None:
        chosen = []
        for t in job.times:
            match = [s for s in snaps if s[1].time is not None
                     and abs(s[1].time - t) <= 1e-9 + 1e-6 * abs(t)]
            if not match:
                raise FileNotFoundError(f"no snapshot at t={t}")
            chosen.extend(match)
        snaps = chosen

    values = []
    for _, grid in snaps:
        v = grid.point_data.get(job.field)
        if v is None:
            v = grid.cell_data[job.field]
        values.append(v)
    if job.color_range is not None:
        clim = (float(job.color_range[0]), float(job.color_range[1]))
        if clim[1] <= clim[0]:
            clim = _padded(*clim)
    else:
        clim = _padded(min(float(v.min()) for v in values),
                       max(float(v.max()) for v in values))

    outdir = Path(job.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    images: list[RenderedImage] = []
    label = FIELD_LABELS.get(job.field, job.field)
    for (path, grid), vals in zip(snaps, values):
        tri = Triangulation(grid.points[:, 0], grid.points[:, 1], grid.triangles)
        fig, ax = plt.subplots(figsize=(4.0, 4.8))
        if vals.shape[0] == grid.points.shape[0]:
            art = ax.tripcolor(tri, vals, shading="gouraud",
                               vmin=clim[0], vmax=clim[1], cmap="inferno")
        else:
            art = ax.tripcolor(tri, facecolors=vals,
                               vmin=clim[0], vmax=clim[1], cmap="inferno")
        ax.set_aspect("equal")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        title = path.stem
        if grid.time is not None:
            title += f"  t={grid.time:g} s"
        ax.set_title(title)
        fig.colorbar(art, ax=ax, label=label)
        out = outdir / f"{path.stem}_{job.field}.png"
        fig.savefig(out, dpi=150, bbox_inches="tight")
        plt.close(fig)
        images.append(RenderedImage(path=out, source=path, clim=clim))

    if len(snaps) > 1:
        fig, axes = plt.subplots(1, len(snaps), figsize=(3.2 * len(snaps), 4.4),
                                 sharey=True)
        for ax, (path, grid), vals in zip(np.atleast_1d(axes), snaps, values):
            tri = Triangulation(grid.points[:, 0], grid.points[:, 1], grid.triangles)
            if vals.shape[0] == grid.points.shape[0]:
                art = ax.tripcolor(tri, vals, shading="gouraud",
                                   vmin=clim[0], vmax=clim[1], cmap="inferno")
            else:
                art = ax.tripcolor(tri, facecolors=vals,
                                   vmin=clim[0], vmax=clim[1], cmap="inferno")
            ax.set_aspect("equal")
            ax.set_title(path.stem)
            ax.set_xlabel("x [m]")
        fig.colorbar(art, ax=list(np.atleast_1d(axes)), label=label)
        out = outdir / f"panel_{job.field}.png"
        fig.savefig(out, dpi=150, bbox_inches="tight")
        plt.close(fig)
        images.append(RenderedImage(path=out, source=Path(job.indir), clim=clim))
    return images


def render_timeseries(csv_path, columns: list[str], out_path) -> dict[str, tuple[float, float]]:
    """Line plot of selected columns against time.

    Returns each plotted column's (min, max); raises (writing nothing) on an
    unknown column or an empty time range.
    """
    table = read_timeseries(csv_path)
    if "t" not in table:
        raise ValueError(f"{csv_path}: no time column")
    for name in columns:
        if name not in table:
            raise KeyError(f"unknown column {name!r}")
    t = table["t"]
    if t.size == 0:
        raise ValueError("empty time range; nothing to plot")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ranges = {}
    for name in columns:
        ax.plot(t, table[name], label=name)
        ranges[name] = (float(table[name].min()), float(table[name].max()))
    ax.set_xlabel("t [s]")
    ax.legend()
    ax.grid(True, alpha=0.3)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return ranges
