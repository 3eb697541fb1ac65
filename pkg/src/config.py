"""
Configuration Management System

Scenario configuration for the regularized conservation law solvers plus the
process-wide runtime settings (worker cap, resource cap, logging) with
environment overrides.
"""

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import psutil

# =============================================================================
# SCENARIO DATACLASSES
# =============================================================================

FLUX_NAMES = ("burgers", "cosine")
IC_NAMES = ("gaussian", "sine", "riemann_tanh", "bump_slope")
RECONSTRUCTIONS = ("none", "minmod")
OUTPUT_FORMATS = ("csv", "ndjson")


@dataclass(frozen=True)
class FluxSection:
    """Flux selection."""

    name: str = "burgers"
    beta: Optional[float] = None

    def params(self) -> Tuple[float, ...]:
        return () if self.beta is None else (self.beta,)


@dataclass(frozen=True)
class ICSection:
    """Initial data selection; params are the generator keyword arguments."""

    name: str = "gaussian"
    params: Dict[str, float] = field(default_factory=dict)
    mollify: bool = False


@dataclass(frozen=True)
class GridSection:
    """Periodic grid on [x_min, x_max) with an optional measurement window."""

    x_min: float = -1.0
    x_max: float = 1.0
    n: int = 256
    window: Optional[Tuple[float, float]] = None

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def measurement_window(self) -> Tuple[float, float]:
        """Window of interest; defaults to the middle half of the domain."""
        if self.window is not None:
            return self.window
        center = 0.5 * (self.x_min + self.x_max)
        return (center - 0.25 * self.length, center + 0.25 * self.length)


@dataclass(frozen=True)
class SolverSection:
    """Model and time-stepping parameters."""

    ell: float = 1.0
    epsilon: float = 0.0
    T: float = 1.0
    cfl: float = 0.4
    record_every: int = 1
    reconstruction: str = "minmod"


@dataclass(frozen=True)
class OutputSection:
    """Output naming and formats."""

    name: str = "run"
    directory: str = "out"
    formats: Tuple[str, ...] = OUTPUT_FORMATS
    snapshot_every: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully validated scenario."""

    flux: FluxSection = field(default_factory=FluxSection)
    ic: ICSection = field(default_factory=ICSection)
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverSection = field(default_factory=SolverSection)
    output: OutputSection = field(default_factory=OutputSection)

    def with_overrides(self, **overrides: Any) -> "ScenarioConfig":
        """
        Copy with selected parameters replaced.

        Recognized keys: ell, epsilon, n, T, cfl, record_every, reconstruction,
        name, beta, ic_params (merged into the existing ones).
        """
        solver_keys = {"ell", "epsilon", "T", "cfl", "record_every", "reconstruction"}
        solver = dataclasses.replace(
            self.solver,
            **{k: v for k, v in overrides.items() if k in solver_keys},
        )
        grid = self.grid
        if "n" in overrides:
            grid = dataclasses.replace(grid, n=int(overrides["n"]))
        output = self.output
        if "name" in overrides:
            output = dataclasses.replace(output, name=str(overrides["name"]))
        flux = self.flux
        if "beta" in overrides:
            flux = dataclasses.replace(flux, beta=float(overrides["beta"]))
        ic = self.ic
        if "ic_params" in overrides:
            merged = dict(ic.params)
            merged.update(overrides["ic_params"])
            ic = dataclasses.replace(ic, params=merged)
        return ScenarioConfig(flux=flux, ic=ic, grid=grid, solver=solver, output=output)


# =============================================================================
# RUNTIME CONFIGURATION
# =============================================================================


@dataclass
class RuntimeConfig:
    """Process-wide settings."""

    workers: int = 1
    max_cell_steps: float = 2e10
    log_level: str = "INFO"
    log_file: Optional[str] = None
    output_dir: str = "out"


class ConfigManager:
    """Manages runtime configuration with environment overrides."""

    def __init__(self):
        """Initialize the configuration manager."""
        self.runtime = RuntimeConfig(workers=psutil.cpu_count(logical=True) or 1)

        # Load environment overrides
        self._load_environment_overrides()

    def _load_environment_overrides(self) -> None:
        """Load configuration overrides from environment variables."""
        if os.getenv("SOLVER_WORKERS"):
            self.runtime.workers = int(os.getenv("SOLVER_WORKERS"))
        if os.getenv("RSCL_MAX_CELL_STEPS"):
            self.runtime.max_cell_steps = float(os.getenv("RSCL_MAX_CELL_STEPS"))
        if os.getenv("RSCL_LOG_LEVEL"):
            self.runtime.log_level = os.getenv("RSCL_LOG_LEVEL").upper()
        if os.getenv("RSCL_LOG_FILE"):
            self.runtime.log_file = os.getenv("RSCL_LOG_FILE")
        if os.getenv("RSCL_OUTPUT_DIR"):
            self.runtime.output_dir = os.getenv("RSCL_OUTPUT_DIR")

    def validate_config(self) -> Dict[str, Any]:
        """Validate the current configuration."""
        errors = []
        warnings = []

        if self.runtime.workers < 1:
            errors.append("Worker count must be at least 1")
        if self.runtime.max_cell_steps <= 0:
            errors.append("Resource cap must be positive")
        if self.runtime.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            warnings.append(f"Unknown log level {self.runtime.log_level}, using INFO")

        return {
            "valid": len(errors) == 0,
            "errors": errors,
            "warnings": warnings,
        }

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary for serialization."""
        return {"runtime": dict(self.runtime.__dict__)}


# =============================================================================
# GLOBAL CONFIGURATION INSTANCE
# =============================================================================

config = ConfigManager()


def get_runtime_config() -> RuntimeConfig:
    """Get runtime configuration."""
    return config.runtime
