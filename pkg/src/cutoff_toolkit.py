"""
Cut-off and truncation functions.

chi_eps linearizes the slope Riccati nonlinearity below -1/eps; S_kappa and
T_kappa = S_kappa' are the quadratic and linear clamps. All functions accept
scalars or numpy arrays.
"""

from typing import Union

import numpy as np

from .error_handler import InvalidParameterError

ArrayLike = Union[float, np.ndarray]


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def chi(epsilon: float, q: ArrayLike) -> ArrayLike:
    """(q + 1/eps)^2 for q <= -1/eps, else 0."""
    if not epsilon > 0:
        raise InvalidParameterError(f"chi needs eps > 0, got {epsilon}")
    q = np.asarray(q, dtype=float)
    shifted = q + 1.0 / epsilon
    return _out(np.where(shifted <= 0.0, shifted * shifted, 0.0))


def S_trunc(kappa: float, xi: ArrayLike) -> ArrayLike:
    if not kappa > 0:
        raise InvalidParameterError(f"S needs kappa > 0, got {kappa}")
    xi = np.asarray(xi, dtype=float)
    value = np.where(
        xi <= -kappa,
        -kappa * (xi + 0.5 * kappa),
        np.where(xi >= kappa, kappa * (xi - 0.5 * kappa), 0.5 * xi * xi),
    )
    return _out(value)


def T_trunc(kappa: float, xi: ArrayLike) -> ArrayLike:
    if not kappa > 0:
        raise InvalidParameterError(f"T needs kappa > 0, got {kappa}")
    return _out(np.clip(np.asarray(xi, dtype=float), -kappa, kappa))


def xi_ts_defect(kappa: float, xi: ArrayLike) -> ArrayLike:
    """
    Left minus right side of

        xi^2 T - 2 xi S = kappa^2 (T - xi)
                          + kappa (xi + kappa)^2 [xi <= -kappa]
                          - kappa (xi - kappa)^2 [xi >= kappa]

    which vanishes identically.
    """
    xi = np.asarray(xi, dtype=float)
    T = np.asarray(T_trunc(kappa, xi))
    S = np.asarray(S_trunc(kappa, xi))
    lhs = xi * xi * T - 2.0 * xi * S
    rhs = (
        kappa * kappa * (T - xi)
        + np.where(xi <= -kappa, kappa * (xi + kappa) ** 2, 0.0)
        - np.where(xi >= kappa, kappa * (xi - kappa) ** 2, 0.0)
    )
    return _out(lhs - rhs)
