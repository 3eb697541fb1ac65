"""
Grid and Field Primitives

Uniform periodic 1-D grid, value-semantic field container and the
derivative, quadrature, variation and norm primitives shared by all solvers.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .error_handler import GridError, InvalidParameterError

MIN_CELLS = 8


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid with cell centers x_i = x_min + (i + 1/2) dx."""

    x_min: float
    x_max: float
    n: int
    periodic: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise GridError("grid endpoints must be finite")
        if self.x_max <= self.x_min:
            raise GridError(
                f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]",
            )
        if int(self.n) != self.n or self.n < MIN_CELLS:
            raise GridError(f"grid needs an integer n >= {MIN_CELLS}, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + (np.arange(self.n) + 0.5) * self.dx
        x.setflags(write=False)
        return x

    def window_mask(self, a: float, b: float) -> np.ndarray:
        """Boolean mask of cell centers inside [a, b]."""
        return (self.x >= a) & (self.x <= b)


@dataclass(frozen=True, eq=False)
class Field:
    """Finite real samples on a grid. Values are copied and frozen."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 1 or values.shape[0] != self.grid.n:
            raise GridError(
                f"field length {values.shape} does not match grid size {self.grid.n}",
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise GridError("field contains non-finite values", {"first_bad_index": bad})
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: Grid1D, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(grid, func(grid.x))

    @classmethod
    def zeros(cls, grid: Grid1D) -> "Field":
        return cls(grid, np.zeros(grid.n))

    def __len__(self) -> int:
        return self.grid.n


def same_grid(a: Field, b: Field) -> None:
    if a.grid != b.grid:
        raise GridError("fields live on different grids")


# =============================================================================
# ARRAY KERNELS
# =============================================================================


def centered_difference(values: np.ndarray, dx: float) -> np.ndarray:
    """Periodic centered difference (v[i+1] - v[i-1]) / (2 dx)."""
    return (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * dx)


def one_sided_gradient(values: np.ndarray, dx: float) -> np.ndarray:
    """Centered in the interior, second-order one-sided at the two ends."""
    return np.gradient(values, dx, edge_order=2)


# =============================================================================
# FIELD OPERATIONS
# =============================================================================


def derivative(field: Field) -> Field:
    return Field(field.grid, centered_difference(field.values, field.grid.dx))


def gradient(field: Field) -> Field:
    """Non-periodic derivative for states whose end values drift apart."""
    return Field(field.grid, one_sided_gradient(field.values, field.grid.dx))


def integrate(field: Union[Field, np.ndarray], dx: float = None) -> float:
    """Midpoint rule dx * sum(values)."""
    if isinstance(field, Field):
        return float(field.grid.dx * np.sum(field.values))
    return float(dx * np.sum(field))


def total_variation(field: Field) -> float:
    """Periodic variation sum |v[i+1] - v[i]|."""
    v = field.values
    return float(np.sum(np.abs(np.roll(v, -1) - v)))


def norm(field: Union[Field, np.ndarray], p: Union[float, str] = 2, dx: float = None) -> float:
    """Discrete L^p norm (dx sum |v|^p)^(1/p); p may be math.inf or 'inf'."""
    if isinstance(field, Field):
        values, dx = field.values, field.grid.dx
    else:
        values = np.asarray(field, dtype=float)
    if p in ("inf", math.inf):
        return float(np.max(np.abs(values))) if values.size else 0.0
    p = float(p)
    if not p >= 1.0:
        raise InvalidParameterError(f"norm needs p >= 1, got {p}")
    if p == 1.0:
        return float(dx * np.sum(np.abs(values)))
    if p == 2.0:
        return float(math.sqrt(dx * np.sum(values * values)))
    return float((dx * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def periodic_sample(field: Field, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Linear interpolation of the periodic extension at arbitrary points."""
    grid = field.grid
    result = np.interp(x, grid.x, field.values, period=grid.length)
    if np.ndim(result) == 0:
        return float(result)
    return result


def restrict(field: Field, coarse: Grid1D) -> Field:
    """Cell-average a field onto a coarser grid whose cells nest exactly."""
    fine = field.grid
    if fine.x_min != coarse.x_min or fine.x_max != coarse.x_max or fine.n % coarse.n:
        raise GridError("grids do not nest", {"fine": fine.n, "coarse": coarse.n})
    ratio = fine.n // coarse.n
    return Field(coarse, field.values.reshape(coarse.n, ratio).mean(axis=1))
