"""
Sweep Service for Parameter Ladders

Runs one scenario over a ladder of l, eps or n values, concurrently up to
the worker cap, and compares each final state with a reference:

- entropy: Godunov solution at 4x the finest resolution, L1 over the window
- ghs:     Hunter-Saxton limit solution, Linf and H1-seminorm over the window
- self:    successive ladder points against each other, with observed
           orders of convergence for an n ladder
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import ScenarioConfig
from .error_handler import FluxError, InvalidParameterError, log_info, log_warning
from .grid_field import Field, Grid1D, periodic_sample, restrict
from .initial_conditions import initial_state
from .performance import check_work_cap, default_worker_count
from .reference import GODUNOV_MAX_CFL, entropy_solve, ghs_solve
from .rscl_core import Trajectory, estimate_steps, run


AXES = ("ell", "epsilon", "n")
COMPARISONS = ("entropy", "ghs", "self")
REFERENCE_REFINEMENT = 4
# Only the initial and final states are stored for sweep points.
SPARSE_RECORDS = 2**31 - 1


@dataclass(frozen=True)
class SweepSpec:
    """A ladder of values for one axis of a base scenario."""

    base: ScenarioConfig
    axis: str
    values: Tuple[float, ...]
    comparison: str = "self"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.axis not in AXES:
            raise InvalidParameterError(f"sweep axis must be one of {', '.join(AXES)}, got '{self.axis}'")
        if self.comparison not in COMPARISONS:
            raise InvalidParameterError(
                f"comparison must be one of {', '.join(COMPARISONS)}, got '{self.comparison}'",
            )
        if len(self.values) < 2:
            raise InvalidParameterError("a sweep needs at least 2 values")
        steps = np.diff(self.values)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise InvalidParameterError("sweep values must be strictly monotone", {"values": self.values})
        if self.axis == "n" and any(v != int(v) for v in self.values):
            raise InvalidParameterError("n ladder values must be integers")

    def configs(self) -> List[ScenarioConfig]:
        """One sparse-recording config per ladder value, in ladder order."""
        out = []
        for value in self.values:
            point = int(value) if self.axis == "n" else value
            out.append(
                self.base.with_overrides(
                    **{self.axis: point},
                    name=f"{self.base.output.name}_{self.axis}{point:g}",
                    record_every=SPARSE_RECORDS,
                ),
            )
        return out


@dataclass
class SweepReport:
    """One row per ladder value plus the monotonicity verdict."""

    axis: str
    comparison: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    decreasing: bool = False
    observed_orders: List[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.decreasing

    def distances(self, key: str = "distance_l1") -> List[Optional[float]]:
        return [row[key] for row in self.rows]

    def to_dicts(self) -> List[Dict[str, Any]]:
        verdict = {
            "axis": self.axis,
            "comparison": self.comparison,
            "verdict": "decreasing" if self.decreasing else "not_decreasing",
            "passed": self.passed,
            "observed_orders": self.observed_orders,
        }
        return [dict(row) for row in self.rows] + [verdict]


# =============================================================================
# DISTANCES
# =============================================================================


def _on_grid(field_: Field, grid: Grid1D) -> np.ndarray:
    """Values of field_ on grid: cell averages when the grids nest, else interpolation."""
    if field_.grid == grid:
        return field_.values
    source = field_.grid
    nests = (
        source.x_min == grid.x_min
        and source.x_max == grid.x_max
        and source.n > grid.n
        and source.n % grid.n == 0
    )
    if nests:
        return restrict(field_, grid).values
    return np.asarray(periodic_sample(field_, grid.x))


def window_distances(
    run_traj: Trajectory,
    ref_traj: Trajectory,
    window: Tuple[float, float],
) -> Dict[str, float]:
    """L1, Linf and H1-seminorm distances of the final states over the window."""
    grid = run_traj.grid
    mask = grid.window_mask(*window)
    u = run_traj.final.u.values
    ref = _on_grid(ref_traj.final.u, grid)
    diff = (u - ref)[mask]
    ref_slope = ref_traj.slope(ref) if ref_traj.grid == grid else run_traj.slope(ref)
    dq = (run_traj.slope(u) - ref_slope)[mask]
    return {
        "distance_l1": float(grid.dx * np.sum(np.abs(diff))),
        "distance_linf": float(np.max(np.abs(diff))) if diff.size else 0.0,
        "distance_h1": float(math.sqrt(grid.dx * np.sum(dq * dq))),
    }


def _pair_distances(coarse: Trajectory, fine: Trajectory, window: Tuple[float, float]) -> Dict[str, float]:
    if coarse.grid.n > fine.grid.n:
        coarse, fine = fine, coarse
    return window_distances(coarse, fine, window)


def _strictly_decreasing(values: Sequence[Optional[float]]) -> bool:
    if any(v is None or not math.isfinite(v) for v in values) or len(values) < 2:
        return False
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) < 0))


# =============================================================================
# SWEEP DRIVER
# =============================================================================


def estimate_work(config: ScenarioConfig, cfl: Optional[float] = None) -> float:
    """Cells x steps for one run of config."""
    grid, model, u0 = initial_state(config)
    steps = estimate_steps(u0, model, config.solver.T, cfl or config.solver.cfl)
    return float(grid.n) * float(steps)


def _reference_configs(spec: SweepSpec, configs: List[ScenarioConfig]) -> Dict[int, ScenarioConfig]:
    """Reference scenario per run resolution."""
    base = spec.base.with_overrides(record_every=SPARSE_RECORDS)
    if spec.comparison == "entropy":
        finest = max(cfg.grid.n for cfg in configs)
        ref = base.with_overrides(
            n=REFERENCE_REFINEMENT * finest,
            name=f"{spec.base.output.name}_entropy_ref",
        )
        return {cfg.grid.n: ref for cfg in configs}
    if spec.comparison == "ghs":
        return {
            cfg.grid.n: base.with_overrides(n=cfg.grid.n, name=f"{spec.base.output.name}_ghs_n{cfg.grid.n}")
            for cfg in configs
        }
    return {}


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepReport:
    """
    Run every ladder point and its reference, then compare final states.

    Args:
        spec: Base scenario, axis, ladder and comparison
        workers: Worker cap; defaults to SOLVER_WORKERS or the CPU count

    Returns:
        SweepReport with one row per ladder value, in ladder order
    """
    configs = spec.configs()
    references = _reference_configs(spec, configs)
    distinct_refs = {id(cfg): cfg for cfg in references.values()}

    total = sum(estimate_work(cfg) for cfg in configs)
    for cfg in distinct_refs.values():
        cfl = min(cfg.solver.cfl, GODUNOV_MAX_CFL) if spec.comparison == "entropy" else None
        total += estimate_work(cfg, cfl)
    check_work_cap(total, f"sweep {spec.base.output.name}", {"points": len(configs)})

    solver = entropy_solve if spec.comparison == "entropy" else ghs_solve

    def run_point(cfg: ScenarioConfig) -> Trajectory:
        log_info(f"sweep point {cfg.output.name} started")
        traj = run(cfg)
        log_info(f"sweep point {cfg.output.name} finished in {traj.wall_time_s:.2f}s")
        return traj

    pool_size = min(default_worker_count(workers), len(configs) + len(distinct_refs))
    with ThreadPoolExecutor(max_workers=pool_size) as pool:
        ref_futures = {key: pool.submit(solver, cfg) for key, cfg in distinct_refs.items()}
        trajectories = list(pool.map(run_point, configs))
        ref_trajs = {key: future.result() for key, future in ref_futures.items()}

    window = spec.base.grid.measurement_window()
    report = SweepReport(axis=spec.axis, comparison=spec.comparison)

    for k, (value, traj) in enumerate(zip(spec.values, trajectories)):
        row: Dict[str, Any] = {
            "axis": spec.axis,
            "value": value,
            "comparison": spec.comparison,
            "n": traj.grid.n,
            "completed": traj.completed,
            "breakdown_time": traj.breakdown_time,
            "distance_l1": None,
            "distance_linf": None,
            "distance_h1": None,
        }
        if spec.comparison == "self":
            if k > 0 and traj.completed and trajectories[k - 1].completed:
                row.update(_pair_distances(trajectories[k - 1], traj, window))
        else:
            ref = ref_trajs[id(references[traj.grid.n])]
            if traj.completed and ref.completed:
                row.update(window_distances(traj, ref, window))
            elif not ref.completed:
                log_warning(f"{ref.name}: reference broke down at t={ref.breakdown_time:.6g}")
        report.rows.append(row)

    if spec.comparison == "self":
        pairs = [row["distance_l1"] for row in report.rows[1:]]
        report.decreasing = _strictly_decreasing(pairs)
        if spec.axis == "n":
            report.observed_orders = observed_orders(spec.values, pairs)
    elif spec.comparison == "entropy":
        report.decreasing = _strictly_decreasing(report.distances("distance_l1"))
    else:
        report.decreasing = _strictly_decreasing(report.distances("distance_linf")) and _strictly_decreasing(
            report.distances("distance_h1"),
        )

    log_info(
        f"sweep {spec.base.output.name} over {spec.axis}: "
        f"{'decreasing' if report.decreasing else 'NOT decreasing'}",
    )
    return report


def observed_orders(ns: Sequence[float], pair_distances: Sequence[Optional[float]]) -> List[float]:
    """Richardson orders log(d_k / d_{k+1}) / log(n_{k+1} / n_k); d_k compares points k and k+1."""
    orders = []
    for k in range(len(pair_distances) - 1):
        d0, d1 = pair_distances[k], pair_distances[k + 1]
        if d0 is None or d1 is None or d0 <= 0 or d1 <= 0:
            orders.append(float("nan"))
            continue
        orders.append(math.log(d0 / d1) / math.log(ns[k + 1] / ns[k]))
    return orders


# =============================================================================
# GALILEAN INVARIANCE
# =============================================================================


def galilean_defect(config: ScenarioConfig, a: float) -> float:
    """
    Max over x of |v(T, x) - u(T, x - a T) - a| where v starts from u0 + a.
    Burgers only, where the regularized equation is Galilean invariant.
    """
    if config.flux.name != "burgers":
        raise FluxError(f"Galilean invariance holds for burgers only, got {config.flux.name}")
    sparse = config.with_overrides(record_every=SPARSE_RECORDS)
    grid, _, u0 = initial_state(sparse)
    base = run(sparse)
    shifted = run(
        sparse.with_overrides(name=f"{config.output.name}_shift"),
        u0=Field(grid, u0.values + a),
    )
    if not (base.completed and shifted.completed):
        raise InvalidParameterError("Galilean check needs runs that reach T")
    T = config.solver.T
    expected = np.asarray(periodic_sample(base.final.u, grid.x - a * T)) + a
    return float(np.max(np.abs(shifted.final.u.values - expected)))
