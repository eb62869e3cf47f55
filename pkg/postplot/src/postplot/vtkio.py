"""Reader for the simulator's legacy ASCII VTK dialect.

Accepts exactly what the simulator writes: an unstructured grid of
triangles in the z=0 plane with optional SCALARS blocks under POINT_DATA
and CELL_DATA.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class VtkFormatError(ValueError):
    pass


@dataclass
class VtkGrid:
    title: str
    points: np.ndarray                 # (n, 3)
    triangles: np.ndarray              # (m, 3) int
    point_data: dict[str, np.ndarray] = field(default_factory=dict)
    cell_data: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def time(self) -> float | None:
        """Snapshot time parsed from a `t=<value>` token in the title."""
        for token in self.title.split():
            if token.startswith("t="):
                try:
                    return float(token[2:])
                except ValueError:
                    return None
        return None


def read_vtk(path) -> VtkGrid:
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f]
    if not lines or not lines[0].startswith("# vtk DataFile"):
        raise VtkFormatError(f"{path}: not a VTK data file")
    if len(lines) < 5 or lines[2] != "ASCII":
        raise VtkFormatError(f"{path}: expected ASCII VTK")
    if lines[3] != "DATASET UNSTRUCTURED_GRID":
        raise VtkFormatError(f"{path}: expected UNSTRUCTURED_GRID")
    title = lines[1]
    i = 4

    def expect(prefix):
        nonlocal i
        while i < len(lines) and not lines[i].strip():
            i += 1
        if i >= len(lines) or not lines[i].startswith(prefix):
            raise VtkFormatError(f"{path}: expected {prefix!r} at line {i + 1}")
        parts = lines[i].split()
        i += 1
        return parts

    parts = expect("POINTS")
    n_points = int(parts[1])
    points = np.array([[float(v) for v in lines[i + k].split()]
                       for k in range(n_points)])
    i += n_points

    parts = expect("CELLS")
    n_cells = int(parts[1])
    tris = np.empty((n_cells, 3), dtype=np.int64)
    for k in range(n_cells):
        row = lines[i + k].split()
        if row[0] != "3":
            raise VtkFormatError(f"{path}: only triangle cells supported")
        tris[k] = [int(row[1]), int(row[2]), int(row[3])]
    i += n_cells

    parts = expect("CELL_TYPES")
    for k in range(n_cells):
        if lines[i + k].strip() != "5":
            raise VtkFormatError(f"{path}: cell type must be 5 (triangle)")
    i += n_cells

    grid = VtkGrid(title=title, points=points, triangles=tris)
    target = None
    count = 0
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if line.startswith("POINT_DATA"):
            target, count = grid.point_data, int(line.split()[1])
            i += 1
        elif line.startswith("CELL_DATA"):
            target, count = grid.cell_data, int(line.split()[1])
            i += 1
        elif line.startswith("SCALARS"):
            name = line.split()[1]
            if target is None:
                raise VtkFormatError(f"{path}: SCALARS outside a data section")
            i += 1
            if not lines[i].startswith("LOOKUP_TABLE"):
                raise VtkFormatError(f"{path}: missing LOOKUP_TABLE")
            i += 1
            vals = np.array([float(lines[i + k]) for k in range(count)])
            target[name] = vals
            i += count
        else:
            raise VtkFormatError(f"{path}: unexpected line {i + 1}: {line!r}")
    return grid
