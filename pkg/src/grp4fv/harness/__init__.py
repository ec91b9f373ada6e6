"""Benchmark problems, reference solutions, error tables and run orchestration."""

from .analysis import ConvergenceAborted, ConvergenceRow, convergence_study, error_norms, reference_field
from .exact import ExactSolutionError, burgers_exact, isentropic_vortex
from .output import write_convergence_csv, write_csv, write_structured_2d
from .presets import ProblemPreset, list_presets, preset
from .runner import RunConfig, RunReport, parse_config, run_simulation

__all__ = [
    "ConvergenceAborted",
    "ConvergenceRow",
    "ExactSolutionError",
    "ProblemPreset",
    "RunConfig",
    "RunReport",
    "burgers_exact",
    "convergence_study",
    "error_norms",
    "isentropic_vortex",
    "list_presets",
    "parse_config",
    "preset",
    "reference_field",
    "run_simulation",
    "write_convergence_csv",
    "write_csv",
    "write_structured_2d",
]
