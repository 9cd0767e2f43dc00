"""Figure rendering for mlceq experiment CSVs."""

from .render import PlotSpec, SchemaError, build_figure, render

__all__ = ["PlotSpec", "SchemaError", "build_figure", "render"]
