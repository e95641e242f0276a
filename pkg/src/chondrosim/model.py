"""Model parameters, coefficient upscaling, steady state, and reaction terms.

The simulated system couples two diffusing cell populations to a
non-diffusing attractant field:

    dc1/dt = a1*lap(c1) - div(b*c1*grad(h)) - alpha*c1 + delta*c2
             + beta*c1*(1 - c1/Kc1 - c2/Kc1)
    dc2/dt = a2*lap(c2) + alpha*c1 - delta*c2
    dh/dt  = -gamma1*h*c2 + gamma2*c2/(Kc2 + c2)

with no-flux boundaries.  This module handles everything pointwise: the
macroscopic motility coefficients derived from mesoscopic cell-scale
quantities, the unique nontrivial equilibrium, and the reaction right-hand
sides (the motility terms live in :mod:`chondrosim.grid`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError

__all__ = [
    "MesoParams",
    "ModelParams",
    "SteadyState",
    "upscale_coefficients",
    "steady_state",
    "reaction_rhs",
    "reaction_jacobian",
    "default_params",
]


def _require_positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
        raise ParameterError(f"parameter {name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class MesoParams:
    """Cell-scale quantities: speeds, turning rates, and orientation bias.

    ``s1``/``s2`` are the speeds of the motile and the differentiated
    population, ``lambda0``/``lambda2`` their turning rates, ``phi`` the
    (small) bias of reorientation toward the attractant gradient, and ``n``
    the spatial dimension.
    """

    s1: float
    s2: float
    lambda0: float
    lambda2: float
    phi: float
    n: int = 2

    def __post_init__(self) -> None:
        for name in ("s1", "s2", "lambda0", "lambda2", "phi"):
            _require_positive(name, getattr(self, name))
        if self.n not in (1, 2, 3):
            raise ParameterError(f"dimension n must be 1, 2, or 3, got {self.n!r}")


@dataclass(frozen=True)
class ModelParams:
    """Macroscopic rate, motility, and capacity constants.

    ``logistic_k2_variant`` switches the crowding term of the first equation
    from beta*c1*(1 - c1/Kc1 - c2/Kc1) to beta*c1*(1 - c1/Kc1 - c2/Kc2).
    It is off by default; with kc1 == kc2 both forms coincide.
    """

    a1: float
    a2: float
    b: float
    alpha: float
    delta: float
    beta: float
    gamma1: float
    gamma2: float
    kc1: float = 1.0
    kc2: float = 1.0
    logistic_k2_variant: bool = False

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "alpha", "delta", "beta", "gamma1", "gamma2", "kc1", "kc2"):
            _require_positive(name, getattr(self, name))
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b) and self.b >= 0.0):
            raise ParameterError(f"taxis sensitivity b must be finite and >= 0, got {self.b!r}")

    def with_b(self, b: float) -> "ModelParams":
        return replace(self, b=b)


@dataclass(frozen=True)
class SteadyState:
    """The nontrivial spatially homogeneous equilibrium (c1*, c2*, h*)."""

    c1: float
    c2: float
    h: float


def upscale_coefficients(meso: MesoParams) -> tuple[float, float, float]:
    """Map cell-scale quantities to the macroscopic (a1, a2, b).

    a1 = s1^2/(n*lambda0), a2 = s2^2/(n*lambda2), b = s1^2*phi/n.
    """
    a1 = meso.s1**2 / (meso.n * meso.lambda0)
    a2 = meso.s2**2 / (meso.n * meso.lambda2)
    b = meso.s1**2 * meso.phi / meso.n
    return a1, a2, b


def steady_state(p: ModelParams) -> SteadyState:
    """Return the unique positive equilibrium of the reaction system.

    The equilibrium balances differentiation against crowding-limited
    proliferation: c2* = (alpha/delta)*c1*, and h* sits where uptake matches
    saturated production, h* = gamma2/(gamma1*(kc2 + c2*)).
    """
    if p.logistic_k2_variant:
        c1 = p.delta * p.kc1 * p.kc2 / (p.delta * p.kc2 + p.alpha * p.kc1)
    else:
        c1 = p.kc1 * p.delta / (p.delta + p.alpha)
    c2 = (p.alpha / p.delta) * c1
    h = p.gamma2 / (p.gamma1 * (p.kc2 + c2))
    return SteadyState(c1=c1, c2=c2, h=h)


def reaction_rhs(p: ModelParams, c1, c2, h):
    """Evaluate the three reaction right-hand sides pointwise.

    Accepts scalars or NumPy arrays (broadcast elementwise); returns the
    triple (dc1, dc2, dh).
    """
    k2 = p.kc2 if p.logistic_k2_variant else p.kc1
    crowding = 1.0 - c1 / p.kc1 - c2 / k2
    dc1 = -p.alpha * c1 + p.delta * c2 + p.beta * c1 * crowding
    dc2 = p.alpha * c1 - p.delta * c2
    dh = -p.gamma1 * h * c2 + p.gamma2 * c2 / (p.kc2 + c2)
    return dc1, dc2, dh


def reaction_jacobian(p: ModelParams, state: SteadyState | None = None) -> np.ndarray:
    """3x3 Jacobian of the reaction terms, by default at the equilibrium.

    Row/column order is (c1, c2, h).
    """
    if state is None:
        state = steady_state(p)
    c1, c2, h = state.c1, state.c2, state.h
    k2 = p.kc2 if p.logistic_k2_variant else p.kc1
    crowding = 1.0 - c1 / p.kc1 - c2 / k2
    J = np.zeros((3, 3))
    J[0, 0] = -p.alpha + p.beta * crowding - p.beta * c1 / p.kc1
    J[0, 1] = p.delta - p.beta * c1 / k2
    J[1, 0] = p.alpha
    J[1, 1] = -p.delta
    J[2, 1] = -p.gamma1 * h + p.gamma2 * p.kc2 / (p.kc2 + c2) ** 2
    J[2, 2] = -p.gamma1 * c2
    return J


def default_params(b: float = 0.0) -> ModelParams:
    """Baseline parameter set used by the built-in scenarios."""
    return ModelParams(
        a1=0.015,
        a2=0.007,
        b=b,
        alpha=0.15,
        delta=0.6,
        beta=0.05,
        gamma1=0.1,
        gamma2=0.3,
        kc1=1.0,
        kc2=1.0,
    )
