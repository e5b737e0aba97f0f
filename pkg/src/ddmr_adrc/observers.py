"""Extended state observers estimating plant states plus a lumped
"total disturbance" channel.

The sliding-mode variant corrects each estimated state through the
innovation gain

    g(e) = K_alpha * |e|^alpha * sign(e) + K_beta * |e|^beta * e

applied to e = y - xhat1; the linear observer is the special case
g(e) = e.  Both run in continuous time:

    xhat1' = xhat2        + beta1 * g(e)
    xhat2' = xhat3 + b*u  + beta2 * g(e)
    xhat3' =                beta3 * g(e)
"""

from dataclasses import dataclass
from typing import NamedTuple


class ObserverState(NamedTuple):
    xhat1: float  # output estimate, rad/s
    xhat2: float  # output-derivative estimate, rad/s^2
    xhat3: float  # total-disturbance estimate, rad/s^3 scale


@dataclass(frozen=True)
class SmesoParams:
    """Sliding-mode observer gains.

    K_alpha/K_beta may be zero individually (setting K_alpha=0, K_beta=1,
    beta_obs=0 reproduces the linear observer exactly); the beta1..beta3
    injection gains must be positive and b_hat non-zero.
    """

    K_alpha: float
    alpha_obs: float
    K_beta: float
    beta_obs: float
    beta1: float
    beta2: float
    beta3: float
    b_hat: float

    def __post_init__(self):
        if self.K_alpha < 0.0 or self.K_beta < 0.0:
            raise ValueError("K_alpha and K_beta must be >= 0")
        if not 0.0 < self.alpha_obs <= 1.0:
            raise ValueError("alpha_obs must be in (0, 1]")
        if self.beta_obs < 0.0:
            raise ValueError("beta_obs must be >= 0")
        for name in ("beta1", "beta2", "beta3"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.b_hat == 0.0:
            raise ValueError("b_hat must be non-zero")


@dataclass(frozen=True)
class LesoParams:
    """Linear observer gains (g(e) = e)."""

    beta1: float
    beta2: float
    beta3: float
    b_hat: float

    def __post_init__(self):
        for name in ("beta1", "beta2", "beta3"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.b_hat == 0.0:
            raise ValueError("b_hat must be non-zero")


def smeso_gain(e_obs: float, p: SmesoParams) -> float:
    """Innovation gain g(e); odd in e and exactly zero at zero."""
    if e_obs == 0.0:
        return 0.0
    mag = abs(e_obs)
    sgn = 1.0 if e_obs > 0.0 else -1.0
    return p.K_alpha * mag ** p.alpha_obs * sgn + p.K_beta * mag ** p.beta_obs * e_obs


def smeso_derivatives(
    s: ObserverState, y: float, u: float, p: SmesoParams
) -> ObserverState:
    """Time derivative of the sliding-mode observer state."""
    g = smeso_gain(y - s.xhat1, p)
    return ObserverState(
        s.xhat2 + p.beta1 * g,
        s.xhat3 + p.b_hat * u + p.beta2 * g,
        p.beta3 * g,
    )


def leso_derivatives(
    s: ObserverState, y: float, u: float, p: LesoParams
) -> ObserverState:
    """Time derivative of the linear observer state."""
    e = y - s.xhat1
    return ObserverState(
        s.xhat2 + p.beta1 * e,
        s.xhat3 + p.b_hat * u + p.beta2 * e,
        p.beta3 * e,
    )


def observer_derivatives(s: ObserverState, y: float, u: float, p) -> ObserverState:
    """Dispatch on the parameter type; keeps closed-loop code variant-free."""
    if isinstance(p, SmesoParams):
        return smeso_derivatives(s, y, u, p)
    if isinstance(p, LesoParams):
        return leso_derivatives(s, y, u, p)
    raise TypeError(f"unsupported observer parameter type {type(p).__name__}")
