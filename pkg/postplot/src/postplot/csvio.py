"""Reader for the simulator's time-series CSV files."""
from __future__ import annotations

import csv

import numpy as np


def read_timeseries(path) -> dict[str, np.ndarray]:
    """Parse a header + float-rows CSV into named columns."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    if data.size == 0:
        data = np.empty((0, len(header)))
    return {name: data[:, k] for k, name in enumerate(header)}
