"""
Flux Models

Uniformly convex flux functions with the derivatives and antiderivatives the
regularized equation and its diagnostics need. All callables are vectorized
over numpy arrays.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from .error_handler import FluxError


ArrayLike = Union[float, np.ndarray]
RealFunc = Callable[[ArrayLike], ArrayLike]

FLUX_SYMBOLS = ("f", "f1", "f2", "f3", "F", "K")

# Range on which the convexity bounds are sampled.
SAMPLE_RANGE = (-10.0, 10.0)


@dataclass(frozen=True)
class FluxModel:
    """
    A uniformly convex flux f with f1 = f', f2 = f'', f3 = f''',
    F' = f and K' = u f'.

    c and C_upper are stored convexity bounds (C_upper may be math.inf).
    sonic_point is the unique zero of f' used by the exact Riemann flux.
    """

    name: str
    f: RealFunc
    f1: RealFunc
    f2: RealFunc
    f3: RealFunc
    F: RealFunc
    K: RealFunc
    c: float
    C_upper: float
    sonic_point: float = 0.0
    params: Tuple[float, ...] = field(default_factory=tuple)

    def sup_f2(self, u: np.ndarray = None) -> float:
        """Upper bound of f'' over the values of u (or C_upper if finite)."""
        if math.isfinite(self.C_upper):
            return self.C_upper
        if u is None or np.size(u) == 0:
            return self.c
        return float(np.max(self.f2(np.asarray(u))))


# =============================================================================
# BUILTIN FLUXES
# =============================================================================


def _burgers() -> FluxModel:
    return FluxModel(
        name="burgers",
        f=lambda u: 0.5 * np.square(u),
        f1=lambda u: 1.0 * np.asarray(u, dtype=float),
        f2=lambda u: np.ones_like(np.asarray(u, dtype=float)),
        f3=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
        F=lambda u: np.power(u, 3) / 6.0,
        K=lambda u: np.power(u, 3) / 3.0,
        c=1.0,
        C_upper=1.0,
    )


def _cosine(beta: float) -> FluxModel:
    # f = u^2/2 + beta cos u; F and K normalized so that F(0) = K(0) = 0
    return FluxModel(
        name="cosine",
        f=lambda u: 0.5 * np.square(u) + beta * np.cos(u),
        f1=lambda u: u - beta * np.sin(u),
        f2=lambda u: 1.0 - beta * np.cos(u),
        f3=lambda u: beta * np.sin(u),
        F=lambda u: np.power(u, 3) / 6.0 + beta * np.sin(u),
        K=lambda u: np.power(u, 3) / 3.0 + beta * (u * np.cos(u) - np.sin(u)),
        c=1.0 - beta,
        C_upper=1.0 + beta,
        params=(beta,),
    )


def builtin_flux(name: str, params: Sequence[float] = ()) -> FluxModel:
    """
    Build one of the builtin flux models.

    Args:
        name: "burgers" or "cosine"
        params: () for burgers, (beta,) with 0 < beta < 1 for cosine

    Raises:
        FluxError: unknown name or invalid parameters
    """
    key = str(name).strip().lower()
    params = tuple(float(p) for p in params)

    if key == "burgers":
        if params:
            raise FluxError("burgers flux takes no parameters", {"params": params})
        return _burgers()

    if key == "cosine":
        if len(params) != 1:
            raise FluxError("cosine flux needs exactly one parameter beta", {"params": params})
        beta = params[0]
        if not (0.0 < beta < 1.0) or not math.isfinite(beta):
            raise FluxError(f"cosine flux needs 0 < beta < 1, got {beta}", {"beta": beta})
        return _cosine(beta)

    raise FluxError(f"unknown flux '{name}'", {"known": ["burgers", "cosine"]})


def eval_flux(model: FluxModel, which: str, u: ArrayLike) -> ArrayLike:
    """Evaluate one of f, f1, f2, f3, F, K; scalars in, floats out."""
    if which not in FLUX_SYMBOLS:
        raise FluxError(f"unknown flux symbol '{which}'", {"known": list(FLUX_SYMBOLS)})
    value = getattr(model, which)(u)
    if np.ndim(value) == 0:
        return float(value)
    return value


def sampled_convexity_bounds(model: FluxModel, samples: int = 20001) -> Tuple[float, float]:
    """Brute-force min and max of f'' over the sample range."""
    u = np.linspace(SAMPLE_RANGE[0], SAMPLE_RANGE[1], samples)
    f2 = model.f2(u)
    return float(np.min(f2)), float(np.max(f2))
