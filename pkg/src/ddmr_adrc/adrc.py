"""Controller assembly: TD + state-error feedback + observer per wheel, and
the transform that turns a disturbance on the non-input channel into a
matched one on the canonical double-integrator form.

For the two-channel affine system

    x1' = f1(x1, x2) + b1*d
    x2' = f2(x1, x2) + b2*u

differentiating the output channel gives the canonical form

    x1'' = f_hat(x1, x2) + b_hat*(u + d_hat)

with f_hat = (df1/dx1)*f1 + (df1/dx2)*f2, b_hat = b2*(df1/dx2) and
d_hat = (b1*(df1/dx1)*d + b1*d') / b_hat.  The observer's extra state then
estimates the lumped disturbance in output-acceleration units and the
control law cancels it through u = (u0 - xhat3) / b_hat.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .observers import LesoParams, ObserverState, SmesoParams
from .state_error_feedback import (
    ErrorVector,
    FalNlsefParams,
    InlsefParams,
    fal_nlsef_control,
    inlsef_control,
)
from .tracking_differentiator import HanTdParams, IntdParams

_DEGENERATE_PARTIAL = 1e-12


class DegenerateTransformError(ValueError):
    """df1/dx2 vanished somewhere on the probed domain, so the transform's
    input gain is undefined there."""


@dataclass(frozen=True)
class CanonicalPlantForms:
    """Evaluable pieces of the canonical form.

    d_hat_coeffs are the coefficients multiplying d and d' in d_hat,
    evaluated at the reference point (constants for a linear plant).
    """

    f_hat: Callable[[float, float], float]
    b_hat: float
    d_hat_coeffs: tuple[float, float]

    def d_hat(self, d: float, d_dot: float) -> float:
        c_d, c_ddot = self.d_hat_coeffs
        return c_d * d + c_ddot * d_dot


def matched_transform(
    f1: Callable[[float, float], float],
    f2: Callable[[float, float], float],
    b1: float,
    b2: float,
    df1_dx1: Callable[[float, float], float],
    df1_dx2: Callable[[float, float], float],
    probe_points: Sequence[tuple[float, float]] = ((0.0, 0.0),),
    reference_point: tuple[float, float] = (0.0, 0.0),
) -> CanonicalPlantForms:
    """Build the canonical forms from the two-channel pieces.

    The partials are supplied analytically by the plant model.  df1/dx2 is
    probed at ``probe_points``; if its magnitude falls below 1e-12 anywhere
    the plant is rejected (the transform divides by b2*df1/dx2).  b_hat and
    the d_hat coefficients are evaluated at ``reference_point``.
    """
    for (px1, px2) in probe_points:
        if abs(df1_dx2(px1, px2)) < _DEGENERATE_PARTIAL:
            raise DegenerateTransformError(
                f"df1/dx2 = {df1_dx2(px1, px2):.3e} at ({px1}, {px2}); "
                "input gain would degenerate"
            )

    rx1, rx2 = reference_point
    b_hat = b2 * df1_dx2(rx1, rx2)
    if abs(b_hat) < _DEGENERATE_PARTIAL:
        raise DegenerateTransformError("b_hat degenerate at reference point")

    def f_hat(x1: float, x2: float) -> float:
        return df1_dx1(x1, x2) * f1(x1, x2) + df1_dx2(x1, x2) * f2(x1, x2)

    d_hat_coeffs = (b1 * df1_dx1(rx1, rx2) / b_hat, b1 / b_hat)
    return CanonicalPlantForms(f_hat=f_hat, b_hat=b_hat, d_hat_coeffs=d_hat_coeffs)


def canonical_acceleration(
    x1: float,
    x2: float,
    u: float,
    d: float,
    d_dot: float,
    forms: CanonicalPlantForms,
) -> float:
    """Second derivative of the output in the canonical form:
    x1'' = f_hat + b_hat*(u + d_hat)."""
    return forms.f_hat(x1, x2) + forms.b_hat * (u + forms.d_hat(d, d_dot))


class ControlDiagnostics(NamedTuple):
    e0: float      # r1 - xhat1
    e1: float      # r2 - xhat2
    u0: float      # raw feedback effort before cancellation
    d_comp: float  # xhat3 / b_hat, the cancellation term in volts


@dataclass(frozen=True)
class ControllerConfig:
    """One per-wheel controller variant with all of its sub-parameters.

    classical_adrc pairs the sign-form TD, fal feedback and linear
    observer; improved_adrc pairs the tanh TD, sector-gain feedback and
    sliding-mode observer.  b_hat must match the observer's input gain.
    use_disturbance_estimate=False keeps the observer running but removes
    xhat3 from the control law (ablation hook).
    """

    variant: str
    td: object
    sef: object
    eso: object
    b_hat: float
    use_disturbance_estimate: bool = field(default=True)

    def __post_init__(self):
        expected = {
            "classical_adrc": (HanTdParams, FalNlsefParams, LesoParams),
            "improved_adrc": (IntdParams, InlsefParams, SmesoParams),
        }
        if self.variant not in expected:
            raise ValueError(f"unknown controller variant {self.variant!r}")
        td_t, sef_t, eso_t = expected[self.variant]
        if not isinstance(self.td, td_t):
            raise ValueError(
                f"{self.variant} requires {td_t.__name__} TD parameters, "
                f"got {type(self.td).__name__}"
            )
        if not isinstance(self.sef, sef_t):
            raise ValueError(
                f"{self.variant} requires {sef_t.__name__} feedback "
                f"parameters, got {type(self.sef).__name__}"
            )
        if not isinstance(self.eso, eso_t):
            raise ValueError(
                f"{self.variant} requires {eso_t.__name__} observer "
                f"parameters, got {type(self.eso).__name__}"
            )
        if self.b_hat == 0.0:
            raise ValueError("b_hat must be non-zero")
        if self.eso.b_hat != self.b_hat:
            raise ValueError("controller b_hat and observer b_hat disagree")


def sef_control(e: ErrorVector, cfg: ControllerConfig) -> float:
    if cfg.variant == "improved_adrc":
        return inlsef_control(e, cfg.sef)
    return fal_nlsef_control(e, cfg.sef)


def adrc_control_step(
    r1: float,
    r2: float,
    obs: ObserverState,
    cfg: ControllerConfig,
    e_int: float = 0.0,
) -> tuple[float, ControlDiagnostics]:
    """One control evaluation: errors against the observer estimates, raw
    feedback effort u0, and the disturbance-cancelling plant input

        u = (u0 - xhat3) / b_hat.

    Memoryless apart from the caller-owned integral state e_int.
    """
    e0 = r1 - obs.xhat1
    e1 = r2 - obs.xhat2
    u0 = sef_control(ErrorVector(e0, e1, e_int), cfg)
    xhat3 = obs.xhat3 if cfg.use_disturbance_estimate else 0.0
    u = (u0 - xhat3) / cfg.b_hat
    return u, ControlDiagnostics(e0, e1, u0, xhat3 / cfg.b_hat)
