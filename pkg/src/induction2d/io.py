"""Deterministic output writers: legacy ASCII VTK fields and CSV time series.

Formatting is fixed (9 significant digits for VTK, 12 for CSV, fixed field
order) so repeated runs of the same configuration produce byte-identical
files.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh


@dataclass
class TimeSeries:
    """One row per coarse step, strictly increasing in time."""

    header: list[str]
    rows: list[list[float]] = field(default_factory=list)

    def validate(self) -> None:
        if any(len(r) != len(self.header) for r in self.rows):
            raise ValueError("row width does not match header")
        t = [r[0] for r in self.rows]
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("rows must be strictly increasing in t")

    def column(self, name: str) -> np.ndarray:
        idx = self.header.index(name)
        return np.array([r[idx] for r in self.rows])


def _fmt9(v: float) -> str:
    return f"{float(v):.9g}"


def _fmt12(v: float) -> str:
    return f"{float(v):.12g}"


def vtk_to_text(mesh: Mesh, point_fields: dict[str, np.ndarray] | None = None,
                cell_fields: dict[str, np.ndarray] | None = None,
                title: str = "induction2d fields") -> str:
    """Serialize mesh + fields as legacy ASCII VTK (unstructured grid)."""
    point_fields = point_fields or {}
    cell_fields = cell_fields or {}
    for name, vals in point_fields.items():
        if np.asarray(vals).shape != (mesh.num_vertices,):
            raise ValueError(f"point field {name!r} length mismatch")
    for name, vals in cell_fields.items():
        if np.asarray(vals).shape != (mesh.num_triangles,):
            raise ValueError(f"cell field {name!r} length mismatch")

    out: list[str] = []
    out.append("# vtk DataFile Version 3.0")
    out.append(title)
    out.append("ASCII")
    out.append("DATASET UNSTRUCTURED_GRID")
    out.append(f"POINTS {mesh.num_vertices} double")
    for x, y in mesh.vertices:
        out.append(f"{_fmt9(x)} {_fmt9(y)} 0")
    nt = mesh.num_triangles
    out.append(f"CELLS {nt} {4 * nt}")
    for a, b, c in mesh.triangles:
        out.append(f"3 {a} {b} {c}")
    out.append(f"CELL_TYPES {nt}")
    out.extend(["5"] * nt)
    if point_fields:
        out.append(f"POINT_DATA {mesh.num_vertices}")
        for name in point_fields:
            out.append(f"SCALARS {name} double 1")
            out.append("LOOKUP_TABLE default")
            out.extend(_fmt9(v) for v in np.asarray(point_fields[name], dtype=float))
    if cell_fields:
        out.append(f"CELL_DATA {nt}")
        for name in cell_fields:
            out.append(f"SCALARS {name} double 1")
            out.append("LOOKUP_TABLE default")
            out.extend(_fmt9(v) for v in np.asarray(cell_fields[name], dtype=float))
    return "\n".join(out) + "\n"


def write_vtk(mesh: Mesh, path, point_fields: dict[str, np.ndarray] | None = None,
              cell_fields: dict[str, np.ndarray] | None = None,
              title: str = "induction2d fields") -> None:
    text = vtk_to_text(mesh, point_fields, cell_fields, title)
    with open(path, "w", newline="\n") as f:
        f.write(text)


def timeseries_to_text(ts: TimeSeries) -> str:
    ts.validate()
    lines = [",".join(ts.header)]
    for row in ts.rows:
        lines.append(",".join(_fmt12(v) for v in row))
    return "\n".join(lines) + "\n"


def write_timeseries_csv(ts: TimeSeries, path) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(timeseries_to_text(ts))
