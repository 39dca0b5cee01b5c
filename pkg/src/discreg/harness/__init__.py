"""Experiment sweeps, figure presets, CSV/SVG output and the CLI."""

from .runner import SweepResult, SweepRow, run_sweep, stable_seed
from .spec import EXPERIMENTS, FIGURES, SweepSpec, figure_preset

__all__ = [
    "EXPERIMENTS",
    "FIGURES",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "figure_preset",
    "run_sweep",
    "stable_seed",
]
