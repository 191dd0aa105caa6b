"""Figure rendering for throughput-outage tradeoff CSVs."""

from .figure import FigureSpec, SchemaError, Series, load_series, render_tradeoff_figure

__all__ = ["FigureSpec", "SchemaError", "Series", "load_series", "render_tradeoff_figure"]
