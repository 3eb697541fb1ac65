"""
Reference Solvers

Oracles for the two limits of the regularized equation: a first-order
Godunov scheme for u_t + f(u)_x = 0 (small l) and a solver for the
generalized Hunter-Saxton equation [u_t + f(u)_x]_x = 1/2 f''(u) u_x^2
(large l).
"""

from typing import Union

import numpy as np

from .config import ScenarioConfig
from .diagnostics import initial_slope_sup, record, record_ghs
from .error_handler import InvalidParameterError, log_info
from .fluxes import FluxModel
from .grid_field import Field, one_sided_gradient
from .helmholtz import hs_nonlocal_array, pressure_source
from .initial_conditions import initial_state
from .performance import RunTimer, check_resource_cap
from .rscl_core import (
    RECONSTRUCTIONS,
    State,
    Trajectory,
    check_finite,
    estimate_steps,
    integrate_scenario,
    local_flux_divergence,
)


ArrayLike = Union[float, np.ndarray]

GODUNOV_MAX_CFL = 0.5


def godunov_flux(model: FluxModel, uL: ArrayLike, uR: ArrayLike) -> ArrayLike:
    """
    Exact Riemann flux of a convex f: min of f over [uL, uR] when uL <= uR,
    max of f over [uR, uL] otherwise. The minimum sits at the sonic point
    clipped to the interval; the maximum at an endpoint.
    """
    uL = np.asarray(uL, dtype=float)
    uR = np.asarray(uR, dtype=float)
    rarefaction = model.f(np.clip(model.sonic_point, uL, np.maximum(uL, uR)))
    shock = np.maximum(model.f(uL), model.f(uR))
    value = np.where(uL <= uR, rarefaction, shock)
    return float(value) if np.ndim(value) == 0 else value


def godunov_divergence(u: np.ndarray, model: FluxModel, dx: float) -> np.ndarray:
    """-d_x f(u) with periodic Godunov interface fluxes."""
    flux = godunov_flux(model, u, np.roll(u, -1))  # interface i + 1/2
    return -(flux - np.roll(flux, 1)) / dx


# =============================================================================
# ENTROPY SOLVER
# =============================================================================


def entropy_solve(config: ScenarioConfig) -> Trajectory:
    """
    First-order Godunov scheme with forward Euler on the periodic grid; l and
    eps are ignored. The CFL number is capped at 1/2.
    """
    grid, model, u0 = initial_state(config)
    solver = config.solver
    cfl = min(solver.cfl, GODUNOV_MAX_CFL)
    check_resource_cap(grid.n, estimate_steps(u0, model, solver.T, cfl), config.output.name)

    M = initial_slope_sup(u0.values, grid.dx)
    trajectory = Trajectory(
        grid=grid,
        model=model,
        ell=0.0,
        epsilon=0.0,
        M=M,
        kind="entropy",
        record_every=solver.record_every,
        name=config.output.name,
    )

    def operator(values: np.ndarray) -> np.ndarray:
        return godunov_divergence(values, model, grid.dx)

    state = State(u0, 0.0, 0.0)
    rate = operator(u0.values)
    trajectory.append(state, record(state, model, None, M), rate)

    steps = 0
    with RunTimer(f"{config.output.name} (entropy)") as timer:
        while state.t < solver.T:
            speed = max(float(np.max(np.abs(model.f1(state.u.values)))), 1.0)
            dt = min(cfl * grid.dx / speed, solver.T - state.t)
            last = state.t + dt >= solver.T * (1.0 - 1e-12)
            values = state.u.values + dt * (rate if rate is not None else operator(state.u.values))
            check_finite(values, state.t + dt, "entropy state")
            state = State(Field(grid, values), solver.T if last else state.t + dt, 0.0)
            steps += 1
            rate = None
            if last or steps % solver.record_every == 0:
                rate = operator(values)
                trajectory.append(state, record(state, model, None, M), rate)

    trajectory.steps = steps
    trajectory.wall_time_s = timer.metrics.wall_time_s
    log_info(f"{config.output.name}: entropy reference n={grid.n}, {steps} steps")
    return trajectory


# =============================================================================
# GENERALIZED HUNTER-SAXTON SOLVER
# =============================================================================


def ghs_rhs_array(
    u: np.ndarray,
    model: FluxModel,
    dx: float,
    reconstruction: str = "minmod",
) -> np.ndarray:
    """
    -[f(u)]_x + hs_nonlocal(f''(u) u_x^2) on the truncated interval, with
    zero-gradient ghost cells for the local flux.
    """
    q = one_sided_gradient(u, dx)
    source = pressure_source(u, q, model, 0.0)
    return local_flux_divergence(u, model, dx, reconstruction, periodic=False) + hs_nonlocal_array(
        source, dx,
    )


def ghs_solve(config: ScenarioConfig) -> Trajectory:
    """
    Integrate u_t = -[f(u)]_x + 1/4 (int_{x_min}^x - int_x^{x_max}) f''(u) u_x^2 dy
    with SSP-RK3. l and eps are ignored; slope blow-up ends the run.
    """
    grid, model, u0 = initial_state(config)
    solver = config.solver
    if solver.reconstruction not in RECONSTRUCTIONS:
        raise InvalidParameterError(f"unknown reconstruction '{solver.reconstruction}'")
    check_resource_cap(
        grid.n,
        estimate_steps(u0, model, solver.T, solver.cfl),
        config.output.name,
    )

    M = initial_slope_sup(u0.values, grid.dx, periodic=False)
    trajectory = Trajectory(
        grid=grid,
        model=model,
        ell=0.0,
        epsilon=0.0,
        M=M,
        kind="ghs",
        record_every=solver.record_every,
        name=config.output.name,
    )

    def operator(values: np.ndarray, t: float) -> np.ndarray:
        out = ghs_rhs_array(values, model, grid.dx, solver.reconstruction)
        check_finite(out, t, "Hunter-Saxton right-hand side")
        return out

    with RunTimer(f"{config.output.name} (ghs)") as timer:
        integrate_scenario(
            config.with_overrides(epsilon=0.0),
            u0,
            model,
            trajectory,
            operator,
            lambda s: record_ghs(s, model, M),
            lambda v: one_sided_gradient(v, grid.dx),
            detect=True,
        )
    trajectory.wall_time_s = timer.metrics.wall_time_s
    log_info(f"{config.output.name}: Hunter-Saxton reference n={grid.n}, {trajectory.steps} steps")
    return trajectory
