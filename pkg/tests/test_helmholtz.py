"""
Unit tests for the Helmholtz inversion

Round-trip accuracy of the periodic solve, agreement with the Green kernel
convolution, positivity and bounds of P, and the large-l limit kernel.
"""

import time

import numpy as np
import pytest

from src.error_handler import InvalidParameterError
from src.grid_field import Field, Grid1D, centered_difference
from src.helmholtz import (
    apply_D,
    build_workspace,
    compute_P,
    forward_apply,
    green_convolve,
    green_kernel,
    helmholtz_solve,
    hs_nonlocal,
    hs_nonlocal_array,
    inner,
    periodic_green_kernel,
    pressure_source,
)
from src.diagnostics import check_pressure_bound
from src.rscl_core import State


def backward_error(ws, v, rhs):
    """Normwise relative backward error of v as a solution of (I - l^2 D2) v = rhs."""
    residual = np.max(np.abs(ws.apply_array(v) - rhs))
    operator_norm = 1.0 + 4.0 * ws.ratio
    return residual / (operator_norm * np.max(np.abs(v)) + np.max(np.abs(rhs)))


class TestHelmholtzSolve:
    """Test cases for the cyclic tridiagonal solve."""

    @pytest.mark.unit
    @pytest.mark.parametrize("n", [128, 1024])
    @pytest.mark.parametrize("ell", [0.05, 1.0, 100.0])
    def test_round_trip(self, rng, n, ell):
        """forward_apply(helmholtz_solve(rhs)) reproduces 100 random rhs fields."""
        grid = Grid1D(-1.0, 1.0, n)
        start = time.perf_counter()
        ws = build_workspace(grid, ell)
        worst = 0.0
        for _ in range(100):
            rhs = Field(grid, rng.standard_normal(n))
            v = helmholtz_solve(ws, rhs)
            worst = max(worst, backward_error(ws, v.values, rhs.values))
        assert worst <= 1e-10
        assert time.perf_counter() - start < 1.0

    @pytest.mark.unit
    def test_forward_apply_inverts(self, periodic_grid):
        ws = build_workspace(periodic_grid, 0.7)
        v = Field.from_function(periodic_grid, lambda x: np.cos(3 * x) + 0.2)
        back = helmholtz_solve(ws, forward_apply(ws, v))
        assert np.allclose(back.values, v.values, atol=1e-10)

    @pytest.mark.unit
    def test_constants_are_fixed(self, periodic_grid):
        ws = build_workspace(periodic_grid, 3.0)
        v = helmholtz_solve(ws, Field(periodic_grid, np.full(periodic_grid.n, 2.5)))
        assert np.allclose(v.values, 2.5)

    @pytest.mark.unit
    def test_fourier_mode_is_damped(self, periodic_grid):
        """(1 + 4 r sin^2(k dx / 2)) is the discrete symbol."""
        ell, k = 0.5, 4
        ws = build_workspace(periodic_grid, ell)
        rhs = Field.from_function(periodic_grid, lambda x: np.sin(k * x))
        symbol = 1.0 + 4.0 * ws.ratio * np.sin(0.5 * k * periodic_grid.dx) ** 2
        assert np.allclose(helmholtz_solve(ws, rhs).values, rhs.values / symbol, atol=1e-12)

    @pytest.mark.unit
    def test_invalid_workspace(self, periodic_grid):
        with pytest.raises(InvalidParameterError):
            build_workspace(periodic_grid, 0.0)
        ws = build_workspace(periodic_grid, 1.0)
        with pytest.raises(InvalidParameterError):
            helmholtz_solve(ws, Field.zeros(Grid1D(0.0, 1.0, 64)))


class TestGreenKernel:
    """Test cases for the Green kernel and its periodization."""

    @pytest.mark.unit
    def test_kernel_values(self):
        assert green_kernel(2.0, 0.0) == pytest.approx(0.25)
        assert green_kernel(1.0, -1.0) == pytest.approx(np.exp(-1.0) / 2.0)
        with pytest.raises(InvalidParameterError):
            green_kernel(-1.0, 0.0)

    @pytest.mark.unit
    def test_periodic_kernel_has_unit_mass(self):
        length, n = 10.0, 4000
        d = (np.arange(n) + 0.5) * length / n
        mass = np.sum(periodic_green_kernel(0.8, d, length)) * length / n
        assert mass == pytest.approx(1.0, rel=1e-4)

    @pytest.mark.unit
    def test_periodic_kernel_large_period(self):
        """Wide periods do not overflow and reduce to the free kernel."""
        value = periodic_green_kernel(0.01, 0.02, 1e4)
        assert np.isfinite(value)
        assert value == pytest.approx(green_kernel(0.01, 0.02), rel=1e-12)

    @pytest.mark.unit
    def test_solve_agrees_with_convolution(self):
        """P from the tridiagonal solve matches direct kernel quadrature (l = 2)."""
        grid = Grid1D(-20.0, 20.0, 512)
        ell = 2.0
        ws = build_workspace(grid, ell)
        source = np.exp(-grid.x**2)
        solved = ws.solve_array(source)
        convolved = green_convolve(grid, ell, source)
        assert np.max(np.abs(solved - convolved)) <= 5e-3 * np.max(np.abs(convolved))

    @pytest.mark.unit
    @pytest.mark.parametrize("ell", [2.0, 4.0])
    def test_pressure_of_sine_matches_convolution(self, burgers, ell):
        """P for sin(x) on a fine periodic grid against kernel quadrature."""
        grid = Grid1D(0.0, 2 * np.pi, 1024)
        ws = build_workspace(grid, ell)
        u = Field.from_function(grid, np.sin)
        P = compute_P(ws, u, burgers).values
        source = pressure_source(u.values, centered_difference(u.values, grid.dx), burgers, 0.0)
        expected = 0.5 * green_convolve(grid, ell, source)
        assert np.max(np.abs(P - expected)) <= 1e-6


class TestPressure:
    """Test cases for P and the Hamiltonian operator."""

    @pytest.mark.unit
    def test_pressure_nonnegative(self, periodic_grid, burgers):
        ws = build_workspace(periodic_grid, 0.3)
        u = Field.from_function(periodic_grid, lambda x: np.sin(x) + 0.5 * np.cos(3 * x))
        assert np.all(compute_P(ws, u, burgers).values >= 0.0)
        assert np.all(compute_P(ws, u, burgers, epsilon=0.1).values >= 0.0)

    @pytest.mark.unit
    def test_cutoff_adds_to_source(self, periodic_grid, burgers):
        u = np.sin(periodic_grid.x)
        q = np.full(periodic_grid.n, -20.0)
        with_cutoff = pressure_source(u, q, burgers, 0.1)
        assert np.allclose(with_cutoff, 400.0 + 100.0)

    @pytest.mark.unit
    def test_negative_epsilon_rejected(self, periodic_grid, burgers):
        ws = build_workspace(periodic_grid, 1.0)
        with pytest.raises(InvalidParameterError):
            compute_P(ws, Field.zeros(periodic_grid), burgers, epsilon=-1.0)

    @pytest.mark.unit
    def test_pressure_bound_on_wide_domain(self, cosine):
        grid = Grid1D(-30.0, 30.0, 1024)
        ws = build_workspace(grid, 1.0)
        u = Field(grid, np.exp(-grid.x**2))
        ratio = check_pressure_bound(State(u, 0.0, 1.0), cosine, ws)
        assert 0.0 < ratio <= 1.0 + 1e-6

    @pytest.mark.unit
    def test_apply_D_is_skew(self, periodic_grid):
        ws = build_workspace(periodic_grid, 0.4)
        a = Field.from_function(periodic_grid, lambda x: np.sin(x) + np.cos(2 * x))
        b = Field.from_function(periodic_grid, lambda x: np.exp(np.sin(x)))
        assert inner(apply_D(ws, a), b) == pytest.approx(-inner(a, apply_D(ws, b)), abs=1e-12)

    @pytest.mark.unit
    def test_apply_D_of_sine(self, periodic_grid):
        """D sin = cos / (1 + l^2) up to discretization error."""
        ell = 0.4
        ws = build_workspace(periodic_grid, ell)
        result = apply_D(ws, Field.from_function(periodic_grid, np.sin)).values
        assert np.max(np.abs(result - np.cos(periodic_grid.x) / (1.0 + ell**2))) < 1e-3


class TestHunterSaxtonKernel:
    """Test cases for the large-l nonlocal operator."""

    @pytest.mark.unit
    def test_constant_source(self):
        grid = Grid1D(0.0, 4.0, 40)
        result = hs_nonlocal(grid, Field(grid, np.ones(40))).values
        assert np.allclose(result, 0.25 * (2.0 * grid.x - grid.length))

    @pytest.mark.unit
    def test_antisymmetric_for_symmetric_source(self):
        grid = Grid1D(-3.0, 3.0, 120)
        result = hs_nonlocal_array(np.exp(-grid.x**2), grid.dx)
        assert np.allclose(result, -result[::-1], atol=1e-12)

    @pytest.mark.unit
    def test_limit_of_the_pressure_gradient(self):
        """-l^2 d_x P with the free-space kernel approaches hs_nonlocal(R) as l grows."""
        grid = Grid1D(-3.0, 3.0, 600)
        ell = 200.0
        x = grid.x
        s = np.clip(x, -1.0, 1.0)
        R = np.where(np.abs(x) < 1.0, (1.0 - s * s) ** 2, 0.0)

        d = x[:, None] - x[None, :]
        # l^2 dG/dx = -1/2 sign(d) exp(-|d| / l); P = 1/2 G * R
        kernel = 0.25 * np.sign(d) * np.exp(-np.abs(d) / ell)
        pressure_gradient = grid.dx * kernel @ R

        limit = hs_nonlocal(grid, Field(grid, R)).values
        assert np.max(np.abs(pressure_gradient - limit)) <= 0.02 * np.max(np.abs(limit))

    @pytest.mark.unit
    def test_grid_mismatch(self):
        grid = Grid1D(0.0, 1.0, 16)
        with pytest.raises(InvalidParameterError):
            hs_nonlocal(grid, Field.zeros(Grid1D(0.0, 2.0, 16)))
