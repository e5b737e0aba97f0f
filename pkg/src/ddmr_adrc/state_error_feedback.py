"""State-error feedback laws mapping tracking errors to a control effort.

The improved law combines an error-dependent sector gain

    k(e) = ki1 + ki2 / (1 + exp(mui * e^2))        in (ki1, ki1 + ki2/2]

with a signed power of the error

    f(e) = |e|^alpha_i * sign(e)

summed over the error and its derivative, plus a saturating power-law
integral term.  The baseline is the classical fal-based law.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

# exp(x) overflows float64 near x = 709; beyond this the gain fraction is
# taken as exactly 0 (the sector floor ki1).
_EXP_OVERFLOW = 700.0


class ErrorVector(NamedTuple):
    e0: float     # tracking error, rad/s
    e1: float     # error derivative, rad/s^2
    e_int: float  # accumulated integral of e0, rad


@dataclass(frozen=True)
class InlsefParams:
    """Improved-law gains; every coefficient must be positive.

    mu3 is carried in the parameter set for completeness but the integral
    term uses only k3, alpha3 and the saturation bound delta.
    """

    k11: float
    k12: float
    k21: float
    k22: float
    mu1: float
    mu2: float
    mu3: float
    alpha1: float
    alpha2: float
    alpha3: float
    k3: float
    delta: float

    def __post_init__(self):
        for name in ("k11", "k12", "k21", "k22", "mu1", "mu2", "mu3",
                     "alpha1", "alpha2", "alpha3", "k3", "delta"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class FalNlsefParams:
    """Classical fal-based law; k1/k2 defaults are artifact tuning, not
    part of the published parameter set (calibrated so the baseline shows
    the documented soft, overshooting response)."""

    alpha1: float
    alpha2: float
    delta1: float
    delta2: float
    k1: float = 4.0
    k2: float = 10.0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "delta1", "delta2", "k1", "k2"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")


def nonlinear_gain(e: float, ki1: float, ki2: float, mui: float) -> float:
    """Sector gain ki1 + ki2 / (1 + exp(mui * e^2)).

    Even in e; maximum ki1 + ki2/2 at e = 0, decaying to ki1 for large |e|.
    """
    a = mui * e * e
    if a > _EXP_OVERFLOW:
        return ki1
    return ki1 + ki2 / (1.0 + math.exp(a))


def error_power(e: float, alpha: float) -> float:
    """Signed power |e|^alpha * sign(e); odd in e, zero at zero."""
    if e > 0.0:
        return abs(e) ** alpha
    if e < 0.0:
        return -(abs(e) ** alpha)
    return 0.0


def inlsef_control(e: ErrorVector, p: InlsefParams) -> float:
    """Improved-law control effort for the error vector e.

    u = k(e0)*f(e0) + k(e1)*f(e1) + u_int with the integral contribution
    u_int = k3 * |e_int|^alpha3 * sign(e_int) clamped to [-delta, +delta]
    for anti-windup.
    """
    u = nonlinear_gain(e.e0, p.k11, p.k12, p.mu1) * error_power(e.e0, p.alpha1)
    u += nonlinear_gain(e.e1, p.k21, p.k22, p.mu2) * error_power(e.e1, p.alpha2)
    u_int = p.k3 * error_power(e.e_int, p.alpha3)
    if u_int > p.delta:
        u_int = p.delta
    elif u_int < -p.delta:
        u_int = -p.delta
    return u + u_int


def fal(e: float, alpha: float, delta: float) -> float:
    """Piecewise power-law feedback: linear inside |e| <= delta, then
    |e|^alpha * sign(e).  Continuous at the seam where both branches give
    delta^alpha."""
    if abs(e) <= delta:
        return e / delta ** (1.0 - alpha)
    return error_power(e, alpha)


def fal_nlsef_control(e: ErrorVector, p: FalNlsefParams) -> float:
    """Classical law k1*fal(e0) + k2*fal(e1); ignores the integral channel."""
    return p.k1 * fal(e.e0, p.alpha1, p.delta1) + p.k2 * fal(e.e1, p.alpha2, p.delta2)
