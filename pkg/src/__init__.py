"""
Regularized Conservation Law Solvers

Numerical solvers and diagnostics for the Hamiltonian regularization of
scalar conservation laws u_t + f(u)_x = 0, together with its two limit
solvers (entropy solution, generalized Hunter-Saxton).
"""

__version__ = "1.0.0"
__author__ = "RSCL developers"

from .config import ScenarioConfig
from .error_handler import SolverError, handle_error, log_info, log_warning
from .fluxes import FluxModel, builtin_flux
from .grid_field import Field, Grid1D
from .parser_service import parse_config, render_config
from .reference import entropy_solve, ghs_solve
from .rscl_core import State, Trajectory, run
from .sweep_service import SweepSpec, run_sweep

# Public API
__all__ = [
    # Configuration
    "ScenarioConfig",
    "parse_config",
    "render_config",
    # Model and grid
    "FluxModel",
    "builtin_flux",
    "Grid1D",
    "Field",
    # Solvers
    "State",
    "Trajectory",
    "run",
    "entropy_solve",
    "ghs_solve",
    # Sweeps
    "SweepSpec",
    "run_sweep",
    # Error handling
    "SolverError",
    "handle_error",
    "log_info",
    "log_warning",
]
