"""Plotting companion for the pinching-antenna simulator's sweep CSVs."""

from .render import (
    AXIS_LABELS,
    COLORS,
    FIGURES,
    FigureSpec,
    LEGEND_LABELS,
    MARKERS,
    RenderError,
    Y_LABEL,
    read_curves,
    render_figures,
    render_one,
)

__version__ = "0.1.0"

__all__ = [
    "AXIS_LABELS",
    "COLORS",
    "FIGURES",
    "FigureSpec",
    "LEGEND_LABELS",
    "MARKERS",
    "RenderError",
    "Y_LABEL",
    "read_curves",
    "render_figures",
    "render_one",
]
