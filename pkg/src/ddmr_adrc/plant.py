"""Physical truth: PMDC motor-wheel dynamics, differential-drive kinematics
and the external torque-disturbance pulse.

Per-wheel motor model (x1 = wheel speed omega_w [rad/s], x2 = armature
current i_a [A], u = armature volts, tau_ext = external torque at the wheel
side [N*m], d = tau_ext / n the motor-side load torque):

    omega_w' = -(B_eq/J_eq) omega_w + (k_t/(J_eq n)) i_a - (1/(J_eq n)) d
    i_a'     = -(k_b n/L_a) omega_w - (R_a/L_a) i_a + (1/L_a) u

The disturbance enters only the speed equation and the input only the
current equation (the mismatched-channel structure the controller's
transform removes).
"""

import math
from dataclasses import dataclass
from typing import NamedTuple


class MotorWheelState(NamedTuple):
    omega_w: float  # wheel angular velocity, rad/s
    i_a: float      # armature current, A


class Pose(NamedTuple):
    x: float      # m
    y: float      # m
    theta: float  # rad, unwrapped


@dataclass(frozen=True)
class MotorParams:
    """PMDC motor + gearbox + wheel constants; all strictly positive.

    R_a [ohm], L_a [H], k_b [V*s/rad], k_t [N*m/A], n gear ratio,
    J_eq [kg*m^2] and B_eq [N*m*s/rad] at the armature.
    """

    R_a: float
    L_a: float
    k_b: float
    k_t: float
    n: float
    J_eq: float
    B_eq: float

    def __post_init__(self):
        for name in ("R_a", "L_a", "k_b", "k_t", "n", "J_eq", "B_eq"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class RobotParams:
    """Wheel-track width D [m] and wheel radius r_w [m]."""

    D: float
    r_w: float

    def __post_init__(self):
        if not self.D > 0.0:
            raise ValueError("D must be > 0")
        if not self.r_w > 0.0:
            raise ValueError("r_w must be > 0")


@dataclass(frozen=True)
class DisturbanceProfile:
    """Rectangular torque pulse of ``magnitude`` N*m on [t_on, t_off)
    applied to the targeted wheel(s); left-closed, right-open so the on/off
    instants are unambiguous."""

    magnitude: float
    t_on: float
    t_off: float
    target: str = "right"

    def __post_init__(self):
        if not self.t_on < self.t_off:
            raise ValueError("t_on < t_off required")
        if not math.isfinite(self.magnitude):
            raise ValueError("magnitude must be finite")
        if self.target not in ("right", "left", "both"):
            raise ValueError("target must be right, left or both")


def motor_derivatives(
    s: MotorWheelState, u: float, tau_ext: float, p: MotorParams
) -> MotorWheelState:
    """Time derivative of one motor-wheel channel."""
    d = tau_ext / p.n
    omega_dot = (
        -(p.B_eq / p.J_eq) * s.omega_w
        + (p.k_t / (p.J_eq * p.n)) * s.i_a
        - d / (p.J_eq * p.n)
    )
    i_dot = (
        -(p.k_b * p.n / p.L_a) * s.omega_w
        - (p.R_a / p.L_a) * s.i_a
        + u / p.L_a
    )
    return MotorWheelState(omega_dot, i_dot)


def body_velocities(
    omega_wr: float, omega_wl: float, p: RobotParams
) -> tuple[float, float]:
    """Body twist (V_m [m/s], omega_m [rad/s]) from wheel speeds."""
    v_m = p.r_w * (omega_wr + omega_wl) / 2.0
    omega_m = p.r_w * (omega_wr - omega_wl) / p.D
    return v_m, omega_m


def kinematics_derivatives(pose: Pose, v_m: float, omega_m: float) -> Pose:
    """Unicycle kinematics: x' = V cos(theta), y' = V sin(theta),
    theta' = omega."""
    return Pose(
        v_m * math.cos(pose.theta),
        v_m * math.sin(pose.theta),
        omega_m,
    )


def disturbance_at(t: float, prof: DisturbanceProfile, wheel: str) -> float:
    """External torque [N*m] seen by ``wheel`` ('right' or 'left') at time t."""
    if prof.target != "both" and wheel != prof.target:
        return 0.0
    if prof.t_on <= t < prof.t_off:
        return prof.magnitude
    return 0.0


@dataclass(frozen=True)
class MotorTransformInputs:
    """The motor model split into the two-channel affine form consumed by
    the matched-disturbance transform: x1' = f1 + b1*d, x2' = f2 + b2*u,
    with f1's partial derivatives supplied analytically (the model is
    linear, so they are constants)."""

    a11: float  # df1/dx1 = -B_eq/J_eq
    a12: float  # df1/dx2 = k_t/(J_eq*n)
    a21: float  # -k_b*n/L_a
    a22: float  # -R_a/L_a
    b1: float   # -1/(J_eq*n), multiplies d in the speed equation
    b2: float   # 1/L_a, multiplies u in the current equation

    def f1(self, x1: float, x2: float) -> float:
        return self.a11 * x1 + self.a12 * x2

    def f2(self, x1: float, x2: float) -> float:
        return self.a21 * x1 + self.a22 * x2

    def df1_dx1(self, x1: float, x2: float) -> float:
        return self.a11

    def df1_dx2(self, x1: float, x2: float) -> float:
        return self.a12


def motor_transform_inputs(p: MotorParams) -> MotorTransformInputs:
    """Affine decomposition of the motor model for the matched transform."""
    return MotorTransformInputs(
        a11=-(p.B_eq / p.J_eq),
        a12=p.k_t / (p.J_eq * p.n),
        a21=-(p.k_b * p.n / p.L_a),
        a22=-(p.R_a / p.L_a),
        b1=-1.0 / (p.J_eq * p.n),
        b2=1.0 / p.L_a,
    )
