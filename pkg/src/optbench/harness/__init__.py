from .experiment import (
    ExperimentSpec,
    RunResult,
    TickClock,
    detect_switch_point,
    mean_series,
    run_experiment,
    select,
    switch_point_for,
)
from .export import export_csv, load_results, read_summary
from .plot import render_plot, step_interpolate
from .stats import MannWhitneyResult, significance

__all__ = [
    "ExperimentSpec",
    "MannWhitneyResult",
    "RunResult",
    "TickClock",
    "detect_switch_point",
    "export_csv",
    "load_results",
    "mean_series",
    "read_summary",
    "render_plot",
    "run_experiment",
    "select",
    "significance",
    "step_interpolate",
    "switch_point_for",
]
