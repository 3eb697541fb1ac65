"""
Initial Condition Library

Builtin initial profiles on a periodic grid, the Friedrichs mollifier used
for the cut-off problem and the scenario setup shared by all solvers.
"""

import logging
import math
from typing import Dict, Mapping, Tuple

import numpy as np
import scipy.ndimage

from .config import ScenarioConfig
from .error_handler import InvalidParameterError
from .fluxes import FluxModel, builtin_flux
from .grid_field import Field, Grid1D

logger = logging.getLogger(__name__)

# Max of |b'| for the bump b(s) = (1 - s^2)^2, attained at s = -1/sqrt(3).
_BUMP_MAX_SLOPE = 8.0 / (3.0 * math.sqrt(3.0))

# Accepted parameters per profile; None means the default depends on the grid.
IC_PARAMETERS: Dict[str, Dict[str, float]] = {
    "gaussian": {"amplitude": 1.0, "center": None, "sigma": 1.0},
    "sine": {"amplitude": 1.0, "wavenumber": 1.0},
    "riemann_tanh": {
        "u_left": 1.0,
        "u_right": 0.0,
        "x0": None,
        "delta": 0.1,
        "ramp_width": None,
    },
    "bump_slope": {"slope": 1.0, "width": 1.0, "center": None},
}


def _resolve(name: str, params: Mapping[str, float], grid: Grid1D) -> Dict[str, float]:
    if name not in IC_PARAMETERS:
        raise InvalidParameterError(
            f"unknown initial condition '{name}'",
            {"known": sorted(IC_PARAMETERS)},
        )
    allowed = IC_PARAMETERS[name]
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise InvalidParameterError(f"unknown parameters for {name}: {', '.join(unknown)}")

    center = 0.5 * (grid.x_min + grid.x_max)
    grid_defaults = {"center": center, "x0": center, "ramp_width": grid.length / 16.0}
    resolved = {}
    for key, default in allowed.items():
        value = params.get(key, default)
        if value is None:
            value = grid_defaults[key]
        resolved[key] = float(value)
    return resolved


def _periodic_offset(x: np.ndarray, center: float, length: float) -> np.ndarray:
    """Signed offset x - center wrapped into [-L/2, L/2)."""
    return np.mod(x - center + 0.5 * length, length) - 0.5 * length


def _riemann_profile(x: np.ndarray, length: float, p: Dict[str, float]) -> np.ndarray:
    # xi runs from the return ramp (xi = 0) through the front (xi = L/2)
    delta, width = p["delta"], p["ramp_width"]
    xi = np.mod(x - (p["x0"] - 0.5 * length), length)
    sigma = (
        0.5 * (1.0 + np.tanh(xi / width))
        - 0.5 * (1.0 + np.tanh((xi - 0.5 * length) / delta))
        + 0.5 * (1.0 + np.tanh((xi - length) / width))
    )
    return p["u_right"] + (p["u_left"] - p["u_right"]) * sigma


def builtin_ic(name: str, params: Mapping[str, float], grid: Grid1D) -> Field:
    """
    Sample a builtin initial profile.

    gaussian      amplitude * exp(-(x - center)^2 / sigma^2)
    sine          amplitude * sin(wavenumber * x)
    riemann_tanh  smoothed step u_left -> u_right at x0 of width delta, with a
                  return ramp of width ramp_width half a period away
    bump_slope    compactly supported C1 bump of half-width `width` whose
                  steepest rising slope equals `slope`
    """
    key = str(name).strip().lower()
    p = _resolve(key, params, grid)
    x = grid.x

    with np.errstate(all="ignore"):
        if key == "gaussian":
            d = _periodic_offset(x, p["center"], grid.length)
            values = p["amplitude"] * np.exp(-(d * d) / (p["sigma"] ** 2))
        elif key == "sine":
            values = p["amplitude"] * np.sin(p["wavenumber"] * x)
        elif key == "riemann_tanh":
            if p["delta"] <= 0 or p["ramp_width"] <= 0:
                raise InvalidParameterError("riemann_tanh needs delta > 0 and ramp_width > 0")
            values = _riemann_profile(x, grid.length, p)
        else:
            if p["width"] <= 0:
                raise InvalidParameterError("bump_slope needs width > 0")
            s = _periodic_offset(x, p["center"], grid.length) / p["width"]
            amplitude = p["slope"] * p["width"] / _BUMP_MAX_SLOPE
            values = np.where(np.abs(s) < 1.0, amplitude * (1.0 - s * s) ** 2, 0.0)

    if not np.all(np.isfinite(values)):
        raise InvalidParameterError(f"parameters of {key} produce non-finite values", p)
    return Field(grid, values)


def mollify(field: Field, epsilon: float) -> Field:
    """Periodic convolution with the unit-mass Friedrichs bump of radius epsilon."""
    if epsilon <= 0:
        return field
    dx = field.grid.dx
    half = int(math.ceil(epsilon / dx)) - 1
    if half < 1:
        return field
    s = np.arange(-half, half + 1) * dx / epsilon
    weights = np.exp(-1.0 / (1.0 - s * s))
    weights /= weights.sum()
    return Field(field.grid, scipy.ndimage.convolve1d(field.values, weights, mode="wrap"))


# =============================================================================
# SCENARIO SETUP
# =============================================================================


def flux_from_config(config: ScenarioConfig) -> FluxModel:
    return builtin_flux(config.flux.name, config.flux.params())


def grid_from_config(config: ScenarioConfig) -> Grid1D:
    return Grid1D(config.grid.x_min, config.grid.x_max, config.grid.n)


def initial_state(config: ScenarioConfig) -> Tuple[Grid1D, FluxModel, Field]:
    """Grid, flux and (optionally mollified) initial field of a scenario."""
    grid = grid_from_config(config)
    model = flux_from_config(config)
    u0 = builtin_ic(config.ic.name, config.ic.params, grid)
    if config.ic.mollify and config.solver.epsilon > 0:
        u0 = mollify(u0, config.solver.epsilon)
        logger.debug("mollified initial data with radius %g", config.solver.epsilon)
    return grid, model, u0
