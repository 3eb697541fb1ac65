"""
Helmholtz Inversion

Green kernel of (1 - l^2 d_xx), the periodic Helmholtz solve, the pressure P,
the Hamiltonian operator D = (1 - l^2 d_xx)^{-1} d_x and the large-l limit
kernel used by the Hunter-Saxton type solver.

The solve factors the cyclic tridiagonal matrix I - l^2 D2 once per
(grid, l) pair: the periodic corners are removed as a rank-one
Sherman-Morrison correction and the remaining tridiagonal block is factored
with SuperLU.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .cutoff_toolkit import chi
from .error_handler import InvalidParameterError, SolverError
from .fluxes import FluxModel
from .grid_field import Field, Grid1D, centered_difference, same_grid

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


# =============================================================================
# KERNELS
# =============================================================================


def green_kernel(ell: float, x: ArrayLike) -> ArrayLike:
    """(2 l)^-1 exp(-|x| / l)."""
    if not ell > 0:
        raise InvalidParameterError(f"green kernel needs l > 0, got {ell}")
    value = np.exp(-np.abs(x) / ell) / (2.0 * ell)
    return float(value) if np.ndim(value) == 0 else value


def periodic_green_kernel(ell: float, d: ArrayLike, length: float) -> ArrayLike:
    """
    Sum of the Green kernel over all periodic images, for 0 <= d <= length.

    Written without cosh/sinh so that length / l may be large.
    """
    if not ell > 0:
        raise InvalidParameterError(f"green kernel needs l > 0, got {ell}")
    s = np.asarray(d, dtype=float) / ell
    two_a = length / ell
    value = (np.exp(-s) + np.exp(s - two_a)) / (2.0 * ell * -np.expm1(-two_a))
    return float(value) if np.ndim(value) == 0 else value


def green_convolve(grid: Grid1D, ell: float, values: np.ndarray) -> np.ndarray:
    """Midpoint-rule convolution with the periodized kernel (dense, O(n^2))."""
    offsets = np.arange(grid.n) * grid.dx
    column = periodic_green_kernel(ell, offsets, grid.length)
    return grid.dx * (scipy.linalg.circulant(column) @ np.asarray(values, dtype=float))


# =============================================================================
# WORKSPACE
# =============================================================================


@dataclass(frozen=True, eq=False)
class HelmholtzWorkspace:
    """Factorization of I - l^2 D2 on a periodic grid; immutable, reentrant."""

    grid: Grid1D
    ell: float
    _lu: object = field(init=False, repr=False)
    _z: np.ndarray = field(init=False, repr=False)
    _v: Tuple[float, float] = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.ell > 0 and math.isfinite(self.ell)):
            raise InvalidParameterError(f"Helmholtz workspace needs l > 0, got {self.ell}")

        n = self.grid.n
        r = self.ell**2 / self.grid.dx**2
        b = 1.0 + 2.0 * r
        gamma = -b
        alpha = beta = -r  # periodic corner entries

        diag = np.full(n, b)
        diag[0] = b - gamma
        diag[-1] = b - alpha * beta / gamma
        off = np.full(n - 1, -r)
        tridiag = scipy.sparse.diags([off, diag, off], [-1, 0, 1], format="csc")
        lu = scipy.sparse.linalg.splu(tridiag, permc_spec="NATURAL")

        u_vec = np.zeros(n)
        u_vec[0] = gamma
        u_vec[-1] = alpha
        z = lu.solve(u_vec)
        v_first, v_last = 1.0, beta / gamma
        denom = 1.0 + v_first * z[0] + v_last * z[-1]
        if denom == 0.0 or not np.all(np.isfinite(z)):
            raise SolverError("singular Helmholtz factorization", details={"ell": self.ell})

        object.__setattr__(self, "_lu", lu)
        object.__setattr__(self, "_z", z / denom)
        object.__setattr__(self, "_v", (v_first, v_last))
        logger.debug("factored Helmholtz operator n=%d ell=%g r=%.3g", n, self.ell, r)

    @property
    def ratio(self) -> float:
        """l^2 / dx^2."""
        return self.ell**2 / self.grid.dx**2

    def solve_array(self, rhs: np.ndarray) -> np.ndarray:
        y = self._lu.solve(np.asarray(rhs, dtype=float))
        v_first, v_last = self._v
        return y - (v_first * y[0] + v_last * y[-1]) * self._z

    def apply_array(self, v: np.ndarray) -> np.ndarray:
        """Forward operator v - l^2 D2 v."""
        return v - self.ratio * (np.roll(v, -1) - 2.0 * v + np.roll(v, 1))


def build_workspace(grid: Grid1D, ell: float) -> HelmholtzWorkspace:
    return HelmholtzWorkspace(grid, float(ell))


# =============================================================================
# OPERATIONS
# =============================================================================


def helmholtz_solve(ws: HelmholtzWorkspace, rhs: Field) -> Field:
    """Return v with (I - l^2 D2) v = rhs."""
    if rhs.grid != ws.grid:
        raise InvalidParameterError("rhs is not on the workspace grid")
    return Field(ws.grid, ws.solve_array(rhs.values))


def forward_apply(ws: HelmholtzWorkspace, v: Field) -> Field:
    if v.grid != ws.grid:
        raise InvalidParameterError("field is not on the workspace grid")
    return Field(ws.grid, ws.apply_array(v.values))


def pressure_source(
    u: np.ndarray,
    q: np.ndarray,
    model: FluxModel,
    epsilon: float,
) -> np.ndarray:
    """R = f''(u) (q^2 + chi_eps(q)), chi_0 = 0."""
    source = q * q
    if epsilon > 0:
        source = source + chi(epsilon, q)
    return model.f2(u) * source


def pressure_array(
    ws: HelmholtzWorkspace,
    u: np.ndarray,
    model: FluxModel,
    epsilon: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Return (P, q) for raw cell values."""
    q = centered_difference(u, ws.grid.dx)
    return 0.5 * ws.solve_array(pressure_source(u, q, model, epsilon)), q


def compute_P(ws: HelmholtzWorkspace, u: Field, model: FluxModel, epsilon: float = 0.0) -> Field:
    """P = 1/2 (1 - l^2 D2)^{-1} [f''(u) (u_x^2 + chi_eps(u_x))]."""
    if u.grid != ws.grid:
        raise InvalidParameterError("state is not on the workspace grid")
    if epsilon < 0:
        raise InvalidParameterError(f"cut-off parameter must be >= 0, got {epsilon}")
    P, _ = pressure_array(ws, u.values, model, epsilon)
    return Field(ws.grid, P)


def apply_D(ws: HelmholtzWorkspace, v: Field) -> Field:
    """Derivative first, then the Helmholtz solve."""
    if v.grid != ws.grid:
        raise InvalidParameterError("field is not on the workspace grid")
    return Field(ws.grid, ws.solve_array(centered_difference(v.values, ws.grid.dx)))


def hs_nonlocal_array(R: np.ndarray, dx: float) -> np.ndarray:
    """1/4 (int_{x_min}^x R - int_x^{x_max} R) by cumulative midpoint sums."""
    R = np.asarray(R, dtype=float)
    inclusive = np.cumsum(R)
    left = dx * (inclusive - 0.5 * R)
    right = dx * (inclusive[-1] - inclusive + 0.5 * R)
    return 0.25 * (left - right)


def hs_nonlocal(grid: Grid1D, R: Field) -> Field:
    if R.grid != grid:
        raise InvalidParameterError("source is not on the given grid")
    return Field(grid, hs_nonlocal_array(R.values, grid.dx))


def inner(a: Field, b: Field) -> float:
    """Discrete L2 inner product."""
    same_grid(a, b)
    return float(a.grid.dx * np.dot(a.values, b.values))
