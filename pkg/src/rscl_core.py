"""
Regularized Conservation Law Engine

Semi-discrete right-hand side of

    u_t + [f(u) + l^2 P]_x = 0,   P = 1/2 (1 - l^2 d_xx)^{-1} f''(u) (u_x^2 + chi_eps(u_x)),

SSP-RK3 time stepping under a CFL restriction, the run driver with slope
blow-up detection for eps = 0, and a characteristics tracer for the one-sided
slope bound.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .config import ScenarioConfig
from .diagnostics import DiagnosticsRecord, initial_slope_sup, oleinik_factor, record
from .error_handler import (
    BlowUpError,
    InvalidParameterError,
    NonFiniteStateError,
    TrajectoryError,
    log_info,
    log_warning,
)
from .fluxes import FluxModel
from .grid_field import Field, Grid1D, centered_difference, one_sided_gradient
from .helmholtz import HelmholtzWorkspace, build_workspace, pressure_array
from .initial_conditions import initial_state
from .performance import RunTimer, check_resource_cap


RECONSTRUCTIONS = ("none", "minmod")

# Slope blow-up: any |u_x| above the absolute cap, or a front sharper than
# the initial oscillation spread over BLOWUP_CELLS cells.
BLOWUP_SLOPE_CAP = 1e6
BLOWUP_CELLS = 4.0

# =============================================================================
# DATA TYPES
# =============================================================================


@dataclass(frozen=True, eq=False)
class State:
    """u at time t for regularization length ell (0 for the limit solvers)."""

    u: Field
    t: float
    ell: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0:
            raise InvalidParameterError(f"state time must be finite and >= 0, got {self.t}")
        if self.ell < 0 or self.epsilon < 0:
            raise InvalidParameterError("ell and epsilon must be >= 0")

    @property
    def grid(self) -> Grid1D:
        return self.u.grid


@dataclass
class Trajectory:
    """Time-ordered states with aligned diagnostics records and rates u_t."""

    grid: Grid1D
    model: FluxModel
    ell: float
    epsilon: float
    M: float
    kind: str = "rscl"
    record_every: int = 1
    name: str = "run"
    states: List[State] = field(default_factory=list)
    records: List[DiagnosticsRecord] = field(default_factory=list)
    rates: List[np.ndarray] = field(default_factory=list)
    steps: int = 0
    breakdown_time: Optional[float] = None
    wall_time_s: float = 0.0

    def append(self, state: State, rec: DiagnosticsRecord, rate: Optional[np.ndarray]) -> None:
        if state.grid != self.grid:
            raise TrajectoryError("state grid differs from trajectory grid")
        if self.states and state.t <= self.states[-1].t:
            raise TrajectoryError(
                f"trajectory times must increase: {state.t} after {self.states[-1].t}",
            )
        self.states.append(state)
        self.records.append(rec)
        if rate is not None:
            self.rates.append(rate)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> State:
        if not self.states:
            raise TrajectoryError("empty trajectory")
        return self.states[-1]

    @property
    def initial(self) -> State:
        if not self.states:
            raise TrajectoryError("empty trajectory")
        return self.states[0]

    @property
    def completed(self) -> bool:
        return self.breakdown_time is None

    @property
    def dense(self) -> bool:
        return self.record_every == 1

    @property
    def periodic(self) -> bool:
        return self.kind != "ghs"

    def slope(self, values: np.ndarray) -> np.ndarray:
        if self.periodic:
            return centered_difference(values, self.grid.dx)
        return one_sided_gradient(values, self.grid.dx)


@dataclass
class CharTrace:
    """Samples (t, X(t), h(t)) along X' = u(t, X), h = u_x(t, X)."""

    x0: float
    t: np.ndarray
    X: np.ndarray
    h: np.ndarray
    max_margin: float


# =============================================================================
# SPATIAL OPERATOR
# =============================================================================


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def local_flux_divergence(
    u: np.ndarray,
    model: FluxModel,
    dx: float,
    reconstruction: str = "minmod",
    periodic: bool = True,
) -> np.ndarray:
    """
    -d_x f(u) in conservative form with Rusanov interface fluxes

        F = 1/2 (f(uL) + f(uR)) - 1/2 max(|f'(uL)|, |f'(uR)|) (uR - uL).

    With "minmod" (the default) the interface states come from minmod-limited
    linear reconstruction; with "none" they are the cell values. The first-order
    variant leaves an O(1) slope overshoot at sonic points, where the viscosity
    |f'(u)| dx/2 has a kink, so slope-bound checks need "minmod". Non-periodic
    arrays use zero-gradient ghost cells.
    """
    padded = np.pad(u, 2, mode="wrap" if periodic else "edge")
    if reconstruction == "minmod":
        jumps = np.diff(padded)
        slopes = _minmod(jumps[:-1], jumps[1:])
        inner = padded[1:-1]
        left = (inner + 0.5 * slopes)[:-1]
        right = (inner - 0.5 * slopes)[1:]
    elif reconstruction == "none":
        left = padded[1:-2]
        right = padded[2:-1]
    else:
        raise InvalidParameterError(f"unknown reconstruction '{reconstruction}'")

    speed = np.maximum(np.abs(model.f1(left)), np.abs(model.f1(right)))
    flux = 0.5 * (model.f(left) + model.f(right)) - 0.5 * speed * (right - left)
    return -(flux[1:] - flux[:-1]) / dx


def check_finite(values: np.ndarray, t: float, what: str) -> None:
    if np.all(np.isfinite(values)):
        return
    bad = np.flatnonzero(~np.isfinite(values))
    finite = values[np.isfinite(values)]
    snapshot = {
        "t": t,
        "first_bad_index": int(bad[0]),
        "bad_count": int(bad.size),
        "min": float(finite.min()) if finite.size else None,
        "max": float(finite.max()) if finite.size else None,
    }
    raise NonFiniteStateError(f"non-finite values in {what} at t={t:.6g}", snapshot)


def nonlocal_term(
    u: np.ndarray,
    model: FluxModel,
    ws: HelmholtzWorkspace,
    epsilon: float,
) -> np.ndarray:
    """-l^2 d_x P with the centered derivative of P."""
    P, _ = pressure_array(ws, u, model, epsilon)
    return -(ws.ell**2) * centered_difference(P, ws.grid.dx)


def rhs_array(
    u: np.ndarray,
    model: FluxModel,
    ws: HelmholtzWorkspace,
    epsilon: float,
    reconstruction: str = "minmod",
    t: float = 0.0,
) -> np.ndarray:
    out = local_flux_divergence(u, model, ws.grid.dx, reconstruction) + nonlocal_term(
        u, model, ws, epsilon,
    )
    check_finite(out, t, "right-hand side")
    return out


def rhs(
    state: State,
    model: FluxModel,
    ws: HelmholtzWorkspace,
    reconstruction: str = "minmod",
) -> Field:
    """-d_x [f(u)] - l^2 d_x P for the given state."""
    if ws.ell != state.ell:
        raise InvalidParameterError(f"workspace ell {ws.ell} differs from state ell {state.ell}")
    if ws.grid != state.grid:
        raise InvalidParameterError("workspace grid differs from state grid")
    values = rhs_array(state.u.values, model, ws, state.epsilon, reconstruction, state.t)
    return Field(state.grid, values)


# =============================================================================
# TIME STEPPING
# =============================================================================


def cfl_dt(state: State, model: FluxModel, cfl: float) -> float:
    """cfl * dx / max(max |f'(u)|, 1): never longer than cfl * dx."""
    if not (0.0 < cfl <= 1.0):
        raise InvalidParameterError(f"cfl must lie in (0, 1], got {cfl}")
    speed = float(np.max(np.abs(model.f1(state.u.values))))
    return cfl * state.grid.dx / max(speed, 1.0)


def ssp_rk3(
    u: np.ndarray,
    dt: float,
    operator: Callable[[np.ndarray], np.ndarray],
    k1: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Three-stage SSP Runge-Kutta step in Shu-Osher form."""
    if k1 is None:
        k1 = operator(u)
    u1 = u + dt * k1
    u2 = 0.75 * u + 0.25 * (u1 + dt * operator(u1))
    return (1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + dt * operator(u2))


def step(
    state: State,
    model: FluxModel,
    ws: HelmholtzWorkspace,
    dt: float,
    reconstruction: str = "minmod",
    k1: Optional[np.ndarray] = None,
) -> State:
    """One SSP-RK3 step; dt may be negative for backward integration."""

    def operator(values: np.ndarray) -> np.ndarray:
        return rhs_array(values, model, ws, state.epsilon, reconstruction, state.t)

    values = ssp_rk3(state.u.values, dt, operator, k1)
    check_finite(values, state.t + dt, "state")
    return State(Field(state.grid, values), state.t + dt, state.ell, state.epsilon)


def detect_blowup(q: np.ndarray, dx: float, oscillation: float) -> bool:
    """True when slopes exceed the cap or a front is resolved by a few cells only."""
    steepest = float(-np.min(q))
    if float(np.max(np.abs(q))) > BLOWUP_SLOPE_CAP:
        return True
    return oscillation > 0 and steepest * dx * BLOWUP_CELLS > oscillation


def estimate_steps(u0: Field, model: FluxModel, T: float, cfl: float) -> int:
    start = State(u0, 0.0, 0.0)
    return int(math.ceil(T / cfl_dt(start, model, cfl)))


# =============================================================================
# RUN DRIVER
# =============================================================================


def integrate_scenario(
    config: ScenarioConfig,
    u0: Field,
    model: FluxModel,
    trajectory: Trajectory,
    operator: Callable[[np.ndarray, float], np.ndarray],
    recorder: Callable[[State], DiagnosticsRecord],
    slope: Callable[[np.ndarray], np.ndarray],
    detect: bool,
) -> Trajectory:
    """
    Shared SSP-RK3 loop: records at step 0, every record_every steps and at T.
    A detected blow-up ends the run with breakdown_time set.
    """
    solver = config.solver
    T = solver.T
    ell = trajectory.ell
    oscillation = float(np.max(u0.values) - np.min(u0.values))
    dx = u0.grid.dx

    state = State(u0, 0.0, ell, solver.epsilon)
    rate = operator(state.u.values, 0.0)
    trajectory.append(state, recorder(state), rate)

    step_count = 0
    while state.t < T:
        dt = min(cfl_dt(state, model, solver.cfl), T - state.t)
        last = state.t + dt >= T * (1.0 - 1e-12)
        values = ssp_rk3(state.u.values, dt, lambda v: operator(v, state.t), rate)
        check_finite(values, state.t + dt, "state")
        state = State(Field(u0.grid, values), T if last else state.t + dt, ell, solver.epsilon)
        step_count += 1
        rate = None

        blown = detect and detect_blowup(slope(values), dx, oscillation)
        if blown or last or step_count % solver.record_every == 0:
            rate = operator(values, state.t)
            trajectory.append(state, recorder(state), rate)
        if blown:
            steepest = float(-np.min(slope(values)))
            trajectory.breakdown_time = state.t
            log_warning(
                f"{trajectory.name}: slope blow-up at t={state.t:.6g} "
                f"(min u_x = {-steepest:.4g}, step {step_count})",
            )
            break

    trajectory.steps = step_count
    return trajectory


def run(config: ScenarioConfig, u0: Optional[Field] = None) -> Trajectory:
    """
    Integrate the regularized equation to T, from the configured initial data
    unless u0 is given on the configured grid.

    With eps > 0 the run never blow-up-aborts; with eps = 0 a slope blow-up
    ends the run early and sets breakdown_time.
    """
    grid, model, configured = initial_state(config)
    if u0 is None:
        u0 = configured
    elif u0.grid != grid:
        raise InvalidParameterError("initial field does not live on the configured grid")
    solver = config.solver
    if solver.reconstruction not in RECONSTRUCTIONS:
        raise InvalidParameterError(f"unknown reconstruction '{solver.reconstruction}'")
    check_resource_cap(
        grid.n,
        estimate_steps(u0, model, solver.T, solver.cfl),
        config.output.name,
    )
    ws = build_workspace(grid, solver.ell)
    M = initial_slope_sup(u0.values, grid.dx)

    trajectory = Trajectory(
        grid=grid,
        model=model,
        ell=solver.ell,
        epsilon=solver.epsilon,
        M=M,
        kind="rscl",
        record_every=solver.record_every,
        name=config.output.name,
    )

    def operator(values: np.ndarray, t: float) -> np.ndarray:
        return rhs_array(values, model, ws, solver.epsilon, solver.reconstruction, t)

    log_info(
        f"{config.output.name}: {model.name} n={grid.n} ell={solver.ell:g} "
        f"eps={solver.epsilon:g} T={solver.T:g}",
    )
    with RunTimer(config.output.name) as timer:
        integrate_scenario(
            config,
            u0,
            model,
            trajectory,
            operator,
            lambda s: record(s, model, ws, M),
            lambda v: centered_difference(v, grid.dx),
            detect=solver.epsilon == 0.0,
        )
    trajectory.wall_time_s = timer.metrics.wall_time_s
    log_info(
        f"{config.output.name}: {trajectory.steps} steps, "
        f"{len(trajectory.states)} records, {trajectory.wall_time_s:.2f}s",
    )
    return trajectory


def run_or_raise(config: ScenarioConfig) -> Trajectory:
    """Like run, but a blow-up raises BlowUpError."""
    trajectory = run(config)
    if trajectory.breakdown_time is not None:
        raise BlowUpError(
            f"{config.output.name} blew up at t={trajectory.breakdown_time:.6g}",
            trajectory.breakdown_time,
        )
    return trajectory


# =============================================================================
# CHARACTERISTICS
# =============================================================================


def trace_characteristic(
    traj: Trajectory,
    x0: float,
    model: FluxModel,
    t_end: Optional[float] = None,
) -> CharTrace:
    """
    Integrate X' = u(t, X) through the stored states with SSP-RK3, u linear in
    time between records and in space between cells, and sample h = u_x(t, X).
    max_margin is max_t h(t) (c t / 2 + 1/M).
    """
    if len(traj.states) < 2:
        raise TrajectoryError("characteristic tracing needs at least two stored states")
    times = traj.times
    if t_end is None:
        t_end = float(times[-1])
    if t_end > times[-1] or t_end < times[0]:
        raise TrajectoryError(
            f"t_end={t_end} outside stored time range [{times[0]}, {times[-1]}]",
        )

    grid = traj.grid
    period = grid.length if traj.periodic else None
    slopes = [traj.slope(s.u.values) for s in traj.states]

    def sample(values: np.ndarray, x: float) -> float:
        if period is None:
            return float(np.interp(x, grid.x, values))
        return float(np.interp(x, grid.x, values, period=period))

    def velocity(k: int, t: float, x: float) -> float:
        t0, t1 = times[k], times[k + 1]
        theta = (t - t0) / (t1 - t0)
        return (1.0 - theta) * sample(traj.states[k].u.values, x) + theta * sample(
            traj.states[k + 1].u.values, x,
        )

    def wrap(x: float) -> float:
        if period is None:
            return min(max(x, grid.x_min), grid.x_max)
        return grid.x_min + (x - grid.x_min) % period

    ts, xs, hs = [float(times[0])], [wrap(x0)], [sample(slopes[0], wrap(x0))]
    X = xs[0]
    for k in range(len(times) - 1):
        t0, t1 = float(times[k]), float(times[k + 1])
        if t0 >= t_end:
            break
        t1 = min(t1, t_end)
        dt = t1 - t0
        v1 = velocity(k, t0, X)
        x1 = X + dt * v1
        x2 = 0.75 * X + 0.25 * (x1 + dt * velocity(k, t1, x1))
        X = wrap((1.0 / 3.0) * X + (2.0 / 3.0) * (x2 + dt * velocity(k, t0 + 0.5 * dt, x2)))
        theta = (t1 - times[k]) / (times[k + 1] - times[k])
        h = (1.0 - theta) * sample(slopes[k], X) + theta * sample(slopes[k + 1], X)
        ts.append(t1)
        xs.append(X)
        hs.append(h)

    t_arr, h_arr = np.array(ts), np.array(hs)
    if not np.all(np.isfinite(h_arr)):
        raise TrajectoryError("slope along characteristic is not finite")
    margin = float(np.max(h_arr * oleinik_factor(model.c, traj.M, t_arr)))
    return CharTrace(x0=float(x0), t=t_arr, X=np.array(xs), h=h_arr, max_margin=margin)
