"""Static figure rendering for femtosim CSV datasets."""

__version__ = "0.1.0"

from .render import FIGURE_SCHEMAS, FigureSpec, SchemaError, load_rows, render

__all__ = ["FIGURE_SCHEMAS", "FigureSpec", "SchemaError", "load_rows",
           "render", "__version__"]
