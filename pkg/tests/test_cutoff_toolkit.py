"""
Unit tests for the cut-off toolkit

Checks the algebraic identities of chi_eps, S_kappa and T_kappa over bulk
random samples and with property-based tests.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.cutoff_toolkit import S_trunc, T_trunc, chi, xi_ts_defect
from src.error_handler import InvalidParameterError

SAMPLES = 100_000


class TestCutoffAlgebra:
    """Bulk checks over 10^5 random (kappa, eps, xi, q)."""

    @pytest.fixture
    def samples(self, rng):
        return {
            "kappa": rng.uniform(0.01, 10.0, SAMPLES),
            "eps": rng.uniform(0.01, 1.0, SAMPLES),
            "xi": rng.uniform(-100.0, 100.0, SAMPLES),
            "q": rng.uniform(-1000.0, 1000.0, SAMPLES),
        }

    @pytest.mark.unit
    def test_xi_ts_identity(self, samples):
        """Identity holds to round-off for every sample."""
        kappa, xi = samples["kappa"], samples["xi"]
        defect = np.array([xi_ts_defect(k, x) for k, x in zip(kappa[:2000], xi[:2000])])
        scale = (1.0 + np.abs(xi[:2000]) + kappa[:2000]) ** 3
        assert np.all(np.abs(defect) <= 1e-12 * scale)

    @pytest.mark.unit
    def test_xi_ts_identity_vectorized(self, samples):
        """Same identity with one kappa over the whole xi array."""
        for kappa in (0.05, 1.0, 7.5):
            defect = xi_ts_defect(kappa, samples["xi"])
            scale = (1.0 + np.abs(samples["xi"]) + kappa) ** 3
            assert np.all(np.abs(defect) <= 1e-12 * scale)

    @pytest.mark.unit
    def test_T_is_derivative_of_S(self, samples):
        """Central differences of S reproduce T (S is C1)."""
        h = 1e-6
        for kappa in (0.1, 1.0, 10.0):
            xi = samples["xi"][:20000]
            fd = (S_trunc(kappa, xi + h) - S_trunc(kappa, xi - h)) / (2.0 * h)
            assert np.max(np.abs(fd - T_trunc(kappa, xi))) <= 1e-4 * (1.0 + kappa)

    @pytest.mark.unit
    def test_T_contracts(self, samples):
        """|T_kappa(xi)| <= |xi|."""
        for kappa in (0.01, 0.5, 10.0):
            assert np.all(np.abs(T_trunc(kappa, samples["xi"])) <= np.abs(samples["xi"]))

    @pytest.mark.unit
    def test_chi_bounds(self, samples):
        """chi <= q^2 and q chi <= 0."""
        q = samples["q"]
        for eps in (0.01, 0.1, 0.99):
            c = chi(eps, q)
            assert np.all(c >= 0.0)
            assert np.all(c <= q * q)
            assert np.all(q * c <= 0.0)

    @pytest.mark.unit
    def test_chi_vanishes_above_threshold(self):
        eps = 0.1
        q = np.array([-10.0, -5.0, 0.0, 3.0])
        assert np.all(chi(eps, q) == 0.0)
        assert chi(eps, -12.0) == pytest.approx(4.0)


class TestCutoffProperties:
    """Property-based checks of the scalar behaviour."""

    @pytest.mark.unit
    @settings(max_examples=200, deadline=None)
    @given(
        kappa=st.floats(min_value=1e-3, max_value=1e3),
        xi=st.floats(min_value=-1e3, max_value=1e3),
    )
    def test_S_continuous_at_kinks_and_nonnegative(self, kappa, xi):
        assert S_trunc(kappa, xi) >= 0.0
        inside = 0.5 * kappa * kappa
        assert S_trunc(kappa, kappa) == pytest.approx(inside)
        assert S_trunc(kappa, -kappa) == pytest.approx(inside)

    @pytest.mark.unit
    @settings(max_examples=200, deadline=None)
    @given(eps=st.floats(min_value=1e-3, max_value=0.999))
    def test_chi_continuous_at_threshold(self, eps):
        assert chi(eps, -1.0 / eps) == 0.0

    @pytest.mark.unit
    @settings(max_examples=100, deadline=None)
    @given(kappa=st.floats(min_value=1e-3, max_value=1e3), xi=st.floats(min_value=-1e3, max_value=1e3))
    def test_scalar_in_scalar_out(self, kappa, xi):
        assert isinstance(T_trunc(kappa, xi), float)
        assert isinstance(S_trunc(kappa, xi), float)


class TestCutoffValidation:
    """Invalid parameters raise."""

    @pytest.mark.unit
    @pytest.mark.parametrize("func", [S_trunc, T_trunc])
    @pytest.mark.parametrize("kappa", [0.0, -1.0])
    def test_kappa_must_be_positive(self, func, kappa):
        with pytest.raises(InvalidParameterError):
            func(kappa, 1.0)

    @pytest.mark.unit
    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            chi(0.0, -3.0)
