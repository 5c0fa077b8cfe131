"""Regenerate publication-style figures from spinchain CSV/JSON artifacts.

This package never recomputes physics: it reads the simulation CLI's
trajectory CSVs, sweep summaries, and metadata sidecars, and draws
deterministic multi-panel figures from them.
"""

__version__ = "0.1.0"

from .artifacts import (MetadataMismatch, MissingInput, SweepSummary, TrajectoryTable,
                        load_density_table, load_sweep_summary, load_trajectory)
from .recipes import FIGURE_IDS, FigureRecipe, PanelSpec, RecipeError, build_recipe
from .render import render

__all__ = [
    "__version__",
    "MissingInput", "MetadataMismatch", "TrajectoryTable", "SweepSummary",
    "load_trajectory", "load_sweep_summary", "load_density_table",
    "FigureRecipe", "PanelSpec", "RecipeError", "build_recipe", "FIGURE_IDS",
    "render",
]
