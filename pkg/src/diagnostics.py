"""
Diagnostics

Per-record energies, Hamiltonian, slope bounds and cut-off dissipation, plus
trajectory-level checks (energy balance, Oleinik, total variation, H1
bounds) and the l^2 P scaling study. Checks return CheckReport objects and
never raise on a failed bound.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.integrate

from .cutoff_toolkit import chi
from .error_handler import InvalidParameterError, TrajectoryError, log_info
from .fluxes import FluxModel
from .grid_field import Field, centered_difference, one_sided_gradient
from .helmholtz import HelmholtzWorkspace, build_workspace, pressure_array

if TYPE_CHECKING:
    from .config import ScenarioConfig
    from .rscl_core import State, Trajectory


DEFAULT_TOLERANCE = 0.05
CSV_COLUMNS = (
    "t",
    "energy",
    "hamiltonian",
    "mean",
    "tv",
    "max_slope",
    "oleinik_margin",
    "energy_balance_residual",
)

# =============================================================================
# RECORDS
# =============================================================================


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy: float
    hamiltonian: float
    mean: float
    tv: float
    max_slope: float
    oleinik_bound: float
    cutoff_dissipation_rate: float
    p_mass: float

    @property
    def oleinik_margin(self) -> float:
        """max_slope / oleinik_bound; finite also where the bound is infinite."""
        if math.isinf(self.oleinik_bound):
            return 0.0
        return self.max_slope / self.oleinik_bound

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data["oleinik_margin"] = self.oleinik_margin
        return data


@dataclass
class CheckReport:
    """Verdict of one check: value is compared against threshold."""

    name: str
    passed: bool
    value: float
    threshold: float
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.name,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            **self.details,
        }


def _inverse_M(M: float) -> float:
    # M <= 0 or infinite: the bound degenerates to 2 / (c t)
    if M <= 0 or math.isinf(M):
        return 0.0
    return 1.0 / M


def oleinik_factor(c: float, M: float, t):
    """c t / 2 + 1/M, vectorized over t."""
    return 0.5 * c * np.asarray(t, dtype=float) + _inverse_M(M)


def oleinik_bound(c: float, M: float, t: float) -> float:
    """1 / (c t / 2 + 1/M); infinite at t = 0 when M <= 0."""
    factor = float(oleinik_factor(c, M, t))
    return math.inf if factor == 0.0 else 1.0 / factor


def initial_slope_sup(u0: np.ndarray, dx: float, periodic: bool = True) -> float:
    """M = max u0' from the same derivative the diagnostics use."""
    q = centered_difference(u0, dx) if periodic else one_sided_gradient(u0, dx)
    return float(np.max(q))


def record(
    state: "State",
    model: FluxModel,
    ws: Optional[HelmholtzWorkspace],
    M: float,
) -> DiagnosticsRecord:
    """
    Diagnostics of one state. Without a workspace (or with ell = 0) the
    pressure terms vanish, which is the record of the entropy solver.
    """
    u = state.u.values
    dx = state.u.grid.dx
    ell2 = state.ell**2
    q = centered_difference(u, dx)
    q2 = q * q

    if ws is not None and state.ell > 0:
        P, _ = pressure_array(ws, u, model, state.epsilon)
        p_mass = ell2 * dx * float(np.sum(P))
    else:
        p_mass = 0.0

    rate = 0.0
    if state.epsilon > 0 and state.ell > 0:
        rate = 0.5 * ell2 * dx * float(np.sum(model.f2(u) * q * chi(state.epsilon, q)))

    return DiagnosticsRecord(
        t=state.t,
        energy=0.5 * dx * float(np.sum(u * u + ell2 * q2)),
        hamiltonian=dx * float(np.sum(model.F(u) + 0.5 * ell2 * model.f1(u) * q2)),
        mean=dx * float(np.sum(u)),
        tv=float(np.sum(np.abs(np.roll(u, -1) - u))),
        max_slope=float(np.max(q)),
        oleinik_bound=oleinik_bound(model.c, M, state.t),
        cutoff_dissipation_rate=rate,
        p_mass=p_mass,
    )


def record_ghs(state: "State", model: FluxModel, M: float) -> DiagnosticsRecord:
    """
    Diagnostics of a Hunter-Saxton type state on the truncated interval:
    energy is 1/2 int u_x^2, hamiltonian 1/2 int f'(u) u_x^2, variation and
    slopes without periodic wrap.
    """
    u = state.u.values
    dx = state.u.grid.dx
    q = one_sided_gradient(u, dx)
    q2 = q * q
    return DiagnosticsRecord(
        t=state.t,
        energy=0.5 * dx * float(np.sum(q2)),
        hamiltonian=0.5 * dx * float(np.sum(model.f1(u) * q2)),
        mean=dx * float(np.sum(u)),
        tv=float(np.sum(np.abs(np.diff(u)))),
        max_slope=float(np.max(q)),
        oleinik_bound=oleinik_bound(model.c, M, state.t),
        cutoff_dissipation_rate=0.0,
        p_mass=0.0,
    )


def energy_balance_series(records: Sequence[DiagnosticsRecord]) -> np.ndarray:
    """E(t) - E(0) - int_0^t cutoff_dissipation_rate, trapezoid in time."""
    if not records:
        return np.zeros(0)
    t = np.array([r.t for r in records])
    energy = np.array([r.energy for r in records])
    rate = np.array([r.cutoff_dissipation_rate for r in records])
    if len(records) == 1:
        return np.zeros(1)
    dissipated = scipy.integrate.cumulative_trapezoid(rate, t, initial=0.0)
    return energy - energy[0] - dissipated


def csv_rows(records: Sequence[DiagnosticsRecord]) -> List[Tuple[float, ...]]:
    residual = energy_balance_series(records)
    return [
        (r.t, r.energy, r.hamiltonian, r.mean, r.tv, r.max_slope, r.oleinik_margin, float(res))
        for r, res in zip(records, residual)
    ]


# =============================================================================
# TRAJECTORY CHECKS
# =============================================================================


def _require_records(traj: "Trajectory", minimum: int = 1) -> None:
    if len(traj.records) < minimum:
        raise TrajectoryError(f"trajectory needs at least {minimum} records")


def check_mean_conservation(traj: "Trajectory", tolerance: float = 1e-9) -> CheckReport:
    _require_records(traj)
    means = np.array([r.mean for r in traj.records])
    drift = float(np.max(np.abs(means - means[0])))
    return CheckReport("mean_conservation", drift <= tolerance, drift, tolerance)


def check_energy_monotone(traj: "Trajectory", rel_tol: float = 1e-6) -> CheckReport:
    """E(t_{k+1}) <= E(t_k) + rel_tol * E(0) on every record."""
    _require_records(traj)
    energy = np.array([r.energy for r in traj.records])
    scale = max(energy[0], 1e-300)
    worst = float(np.max(np.diff(energy)) / scale) if energy.size > 1 else 0.0
    worst = max(worst, 0.0)
    return CheckReport("energy_monotone", worst <= rel_tol, worst, rel_tol)


def check_energy_balance(traj: "Trajectory", tolerance: float = DEFAULT_TOLERANCE) -> CheckReport:
    """
    Compare E(t) - E(0) with the time integral of the cut-off dissipation rate,
    relative to E(0). Needs every step recorded.
    """
    if not traj.dense:
        raise TrajectoryError(
            f"energy balance needs dense records, got record_every={traj.record_every}",
        )
    _require_records(traj)
    residual = energy_balance_series(traj.records)
    e0 = traj.records[0].energy
    mismatch = float(np.max(np.abs(residual))) / max(e0, 1e-300) if e0 > 0 else 0.0
    energy_change = traj.records[-1].energy - e0
    return CheckReport(
        "energy_balance",
        mismatch <= tolerance,
        mismatch,
        tolerance,
        {
            "energy_change": energy_change,
            "dissipated": float(energy_change - residual[-1]),
            "epsilon": traj.epsilon,
        },
    )


def check_oleinik(
    traj: "Trajectory",
    c: float,
    M: float,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CheckReport:
    """Worst max_x u_x (c t / 2 + 1/M) over the records."""
    _require_records(traj)
    t = np.array([r.t for r in traj.records])
    slopes = np.array([r.max_slope for r in traj.records])
    margins = slopes * oleinik_factor(c, M, t)
    worst = int(np.argmax(margins))
    value = float(margins[worst])
    return CheckReport(
        "oleinik",
        value <= 1.0 + tolerance,
        value,
        1.0 + tolerance,
        {"t_worst": float(t[worst]), "M": M, "c": c},
    )


def check_tv_bound(
    traj: "Trajectory",
    c: float,
    C: float,
    M: float,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CheckReport:
    """Measured ||u_x||_1 against ||u0'||_1 (c M t / 2 + 1)^(2C/c)."""
    if not (math.isfinite(C) and math.isfinite(M)):
        raise InvalidParameterError("TV bound needs finite C and M", {"C": C, "M": M})
    _require_records(traj)
    t = np.array([r.t for r in traj.records])
    tv = np.array([r.tv for r in traj.records])
    bound = tv[0] * np.power(0.5 * c * M * t + 1.0, 2.0 * C / c)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, tv / bound, np.where(tv > 0, np.inf, 0.0))
    value = float(np.max(ratio))
    return CheckReport("tv_bound", value <= 1.0 + tolerance, value, 1.0 + tolerance)


def check_energy_bounds(traj: "Trajectory", tolerance: float = DEFAULT_TOLERANCE) -> CheckReport:
    """
    ||u||_2 <= (l^2 + 1)^(1/2) ||u0||_H1 and ||u_x||_2 <= (l^-2 + 1)^(1/2) ||u0||_H1
    on every stored state.
    """
    _require_records(traj)
    if not traj.ell > 0:
        raise InvalidParameterError("H1 bounds need ell > 0")
    dx = traj.grid.dx
    u0 = traj.states[0].u.values
    q0 = traj.slope(u0)
    h1 = math.sqrt(dx * float(np.sum(u0 * u0 + q0 * q0)))
    u_cap = math.sqrt(traj.ell**2 + 1.0) * h1
    q_cap = math.sqrt(traj.ell**-2 + 1.0) * h1

    worst = 0.0
    for state in traj.states:
        u = state.u.values
        q = traj.slope(u)
        if h1 == 0.0:
            worst = max(worst, 0.0 if not np.any(u) else math.inf)
            continue
        worst = max(
            worst,
            math.sqrt(dx * float(np.sum(u * u))) / u_cap,
            math.sqrt(dx * float(np.sum(q * q))) / q_cap,
        )
    return CheckReport("energy_bounds", worst <= 1.0 + tolerance, worst, 1.0 + tolerance)


def check_ghs_energy(traj: "Trajectory", rel_tol: float = 1e-6) -> CheckReport:
    """1/2 int u_x^2 nonincreasing along a Hunter-Saxton type run."""
    report = check_energy_monotone(traj, rel_tol)
    report.name = "ghs_energy"
    return report


def run_check_suite(traj: "Trajectory") -> List[CheckReport]:
    """Every check that applies to the trajectory's kind, l, eps and flux."""
    _require_records(traj)
    T = traj.final.t
    reports = [
        CheckReport(
            "completed",
            traj.completed,
            traj.breakdown_time if traj.breakdown_time is not None else T,
            T,
        ),
    ]
    if traj.kind == "ghs":
        reports.append(check_ghs_energy(traj))
    else:
        reports.append(check_mean_conservation(traj))
        if traj.ell > 0:
            reports.append(check_energy_monotone(traj))
            reports.append(check_energy_bounds(traj))
        if traj.epsilon > 0 and traj.dense:
            reports.append(check_energy_balance(traj))
    reports.append(check_oleinik(traj, traj.model.c, traj.M))
    if math.isfinite(traj.model.C_upper) and math.isfinite(traj.M) and traj.M > 0:
        reports.append(check_tv_bound(traj, traj.model.c, traj.model.C_upper, traj.M))

    for report in reports:
        log_info(f"{traj.name}: check {report.name} {'PASS' if report.passed else 'FAIL'} ({report.value:.6g})")
    return reports


def check_pressure_bound(
    state: "State",
    model: FluxModel,
    ws: HelmholtzWorkspace,
) -> float:
    """
    Ratio l ||P||_inf / (1/4 sup f'' ||u_x||_2^2); at most 1 when the domain is
    wide compared with l.
    """
    u = state.u.values
    P, q = pressure_array(ws, u, model, state.epsilon)
    source = float(np.sum(q * q)) * ws.grid.dx
    if state.epsilon > 0:
        source += float(np.sum(chi(state.epsilon, q))) * ws.grid.dx
    denominator = 0.25 * model.sup_f2(u) * source
    if denominator == 0.0:
        return 0.0
    return ws.ell * float(np.max(np.abs(P))) / denominator


def slope_equation_residual(
    state: "State",
    model: FluxModel,
    ws: HelmholtzWorkspace,
    u_t: Field,
) -> Field:
    """q_t + f'(u) q_x + 1/2 f''(u) q^2 + P - 1/2 f''(u) chi_eps(q) for a given u_t."""
    u = state.u.values
    dx = ws.grid.dx
    P, q = pressure_array(ws, u, model, state.epsilon)
    q_t = centered_difference(u_t.values, dx)
    q_x = centered_difference(q, dx)
    f2 = model.f2(u)
    residual = q_t + model.f1(u) * q_x + 0.5 * f2 * q * q + P
    if state.epsilon > 0:
        residual = residual - 0.5 * f2 * chi(state.epsilon, q)
    return Field(ws.grid, residual)


# =============================================================================
# SPACE-TIME MEASUREMENTS
# =============================================================================


def _window_indices(traj: "Trajectory", window: Tuple[float, float, float, float]):
    """
    Record indices covering [t0, t1] (the records inside plus the nearest one
    on either side) and the spatial mask. Fewer than two records inside the
    time window raise TrajectoryError.
    """
    t0, t1, a, b = window
    times = traj.times
    grid = traj.grid
    if not (t0 < t1 and a < b):
        raise TrajectoryError(f"degenerate window {window}")
    if t0 < times[0] - 1e-12 or t1 > times[-1] + 1e-12:
        raise TrajectoryError(
            f"time window [{t0}, {t1}] outside trajectory [{times[0]}, {times[-1]}]",
        )
    if a < grid.x_min or b > grid.x_max:
        raise TrajectoryError(f"space window [{a}, {b}] outside domain")
    inside = np.flatnonzero((times >= t0 - 1e-12) & (times <= t1 + 1e-12))
    if inside.size < 2:
        raise TrajectoryError(
            f"time window [{t0}, {t1}] holds {inside.size} record(s), need at least 2; "
            f"record more often",
            {"record_every": traj.record_every},
        )
    lo = inside[0] - 1 if inside[0] > 0 and times[inside[0]] > t0 else inside[0]
    hi = inside[-1] + 1 if inside[-1] < times.size - 1 and times[inside[-1]] < t1 else inside[-1]
    return np.arange(lo, hi + 1), grid.window_mask(a, b)


def _window_integral(times: np.ndarray, values: np.ndarray, t0: float, t1: float) -> float:
    """Trapezoid rule over [t0, t1] for samples linear in time between records."""
    interior = times[(times > t0) & (times < t1)]
    nodes = np.concatenate(([t0], interior, [t1]))
    return float(scipy.integrate.trapezoid(np.interp(nodes, times, values), nodes))


def measure_slope_lp(
    traj: "Trajectory",
    p: float,
    window: Tuple[float, float, float, float],
) -> float:
    """int int (|u_t|^p + |u_x|^p) over (t0, t1) x (a, b), u_t from stored rates."""
    if not (2.0 < p < 3.0):
        raise InvalidParameterError(f"exponent must lie in (2, 3), got {p}")
    if not traj.dense or len(traj.rates) != len(traj.states):
        raise TrajectoryError("slope measurement needs dense records with stored rates")
    selected, mask = _window_indices(traj, window)
    dx = traj.grid.dx
    per_time = np.array(
        [
            dx
            * float(
                np.sum(
                    np.abs(traj.rates[k][mask]) ** p
                    + np.abs(traj.slope(traj.states[k].u.values)[mask]) ** p,
                ),
            )
            for k in selected
        ],
    )
    return _window_integral(traj.times[selected], per_time, window[0], window[1])


def windowed_p_mass(
    traj: "Trajectory",
    window: Tuple[float, float, float, float],
) -> float:
    """int int l^2 P over a space-time window."""
    selected, mask = _window_indices(traj, window)
    ws = build_workspace(traj.grid, traj.ell)
    dx = traj.grid.dx
    per_time = []
    for k in selected:
        P, _ = pressure_array(ws, traj.states[k].u.values, traj.model, traj.epsilon)
        per_time.append(traj.ell**2 * dx * float(np.sum(P[mask])))
    return _window_integral(traj.times[selected], np.array(per_time), window[0], window[1])


@dataclass
class ScalingReport:
    ells: List[float]
    p_mass: List[float]
    slope_fit: float
    decreasing: bool
    passed: bool

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"ell": ell, "p_mass": value, "slope_fit": self.slope_fit}
            for ell, value in zip(self.ells, self.p_mass)
        ]


def p_mass_scaling(
    configs: Sequence["ScenarioConfig"],
    window: Optional[Tuple[float, float, float, float]] = None,
    min_slope: float = 0.5,
) -> ScalingReport:
    """
    Run one scenario over an l ladder and fit log(int int l^2 P) against log l.
    The default window is t in [T/2, T] over the grid measurement window.
    """
    from .rscl_core import run

    if len(configs) < 3:
        raise InvalidParameterError("p_mass scaling needs at least 3 ladder points")

    ordered = sorted(configs, key=lambda cfg: cfg.solver.ell, reverse=True)
    ells, values = [], []
    for cfg in ordered:
        traj = run(cfg)
        if window is None:
            a, b = cfg.grid.measurement_window()
            run_window = (0.5 * cfg.solver.T, cfg.solver.T, a, b)
        else:
            run_window = window
        ells.append(cfg.solver.ell)
        values.append(windowed_p_mass(traj, run_window))

    values_arr = np.array(values)
    decreasing = bool(np.all(np.diff(values_arr) < 0))
    if np.all(values_arr > 0):
        slope = float(np.polyfit(np.log(ells), np.log(values_arr), 1)[0])
    else:
        slope = float("nan")
    passed = decreasing and slope >= min_slope
    log_info(f"p_mass scaling: slope {slope:.3f}, decreasing={decreasing}")
    return ScalingReport(ells, values, slope, decreasing, passed)
