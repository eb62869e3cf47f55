"""Batch renderer for induction2d simulator outputs (CSV + legacy VTK)."""

__version__ = "0.1.0"

from .csvio import read_timeseries
from .plots import PlotJob, RenderedImage, render_snapshot, render_timeseries
from .vtkio import VtkGrid, read_vtk

__all__ = ["PlotJob", "RenderedImage", "VtkGrid", "read_timeseries",
           "read_vtk", "render_snapshot", "render_timeseries", "__version__"]
