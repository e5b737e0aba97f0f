"""Closed-loop simulation: two motor-wheel channels, one controller per
wheel, body kinematics, reference trajectory and uniform-grid logging.

Everything is integrated as one monolithic ODE of 19 continuous states
(per wheel: motor 2, observer 3, tracking differentiator 2, feedback
integral 1; plus pose 3), with the control input recomputed inside every
derivative evaluation, i.e. continuous-time control with no sample-and-hold.
A run is single-threaded and bit-reproducible; distinct runs share only
immutable configs.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .adrc import ControllerConfig, adrc_control_step
from .numerics import IntegratorConfig, IntegrationError, integrate_logged
from .observers import ObserverState
from .plant import (
    DisturbanceProfile,
    MotorParams,
    MotorWheelState,
    Pose,
    RobotParams,
    body_velocities,
    kinematics_derivatives,
)

# Benchmark rig constants (published parameter set).
DEFAULT_MOTOR = MotorParams(
    R_a=0.1557, L_a=0.82, k_b=1.185, k_t=1.1882, n=3.0, J_eq=0.2752,
    B_eq=0.3922,
)
DEFAULT_ROBOT = RobotParams(D=0.40, r_w=0.075)

# Reference signal: a constant, or a piecewise-constant schedule of
# (start_time, value) pairs sorted by time.
ReferenceSignal = Union[float, Sequence[tuple[float, float]]]

# State vector layout. Per wheel: motor (2), observer (3), TD (2),
# feedback-integral (1); then pose (3).
_W, _IA, _XH1, _XH2, _XH3, _R1, _R2, _EINT = range(8)
_LEFT = 8
_POSE = 16
N_STATES = 19

_SUBSYSTEMS = (
    "right motor", "right motor",
    "right observer", "right observer", "right observer",
    "right tracking differentiator", "right tracking differentiator",
    "right feedback integral",
    "left motor", "left motor",
    "left observer", "left observer", "left observer",
    "left tracking differentiator", "left tracking differentiator",
    "left feedback integral",
    "pose", "pose", "pose",
)

CSV_COLUMNS = (
    "t", "wr_ref", "wl_ref", "wr", "wl", "iar", "ial", "ur", "ul",
    "xhat1_r", "xhat2_r", "xhat3_r", "xhat1_l", "xhat2_l", "xhat3_l",
    "r1_r", "r2_r", "r1_l", "r2_l",
    "x", "y", "theta", "x_ref", "y_ref", "theta_ref", "e_theta", "tau_ext",
)


class SimulationError(RuntimeError):
    """Closed-loop integration failed; names the time and subsystem."""

    def __init__(self, t: float, subsystem: str, message: str):
        self.t = t
        self.subsystem = subsystem
        super().__init__(message)


@dataclass(frozen=True)
class Scenario:
    """One closed-loop experiment definition.

    Defaults reproduce the benchmark scenario: both wheels commanded to
    1 rad/s for 100 s with a rectangular torque pulse on the right wheel
    over t in [30, 50).  The pulse magnitude (2 N*m) and the pi/4 initial
    heading are artifact choices, not published values.
    measurement_noise, when set, is a deterministic function
    t -> (noise_right, noise_left) added to the wheel speeds fed to the
    observers.
    """

    ref_omega_r: ReferenceSignal = 1.0
    ref_omega_l: ReferenceSignal = 1.0
    duration_s: float = 100.0
    disturbance: DisturbanceProfile = field(
        default_factory=lambda: DisturbanceProfile(
            magnitude=2.0, t_on=30.0, t_off=50.0, target="right"
        )
    )
    log_step_s: float = 0.01
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    initial_pose: Pose = Pose(0.0, 0.0, math.pi / 4)
    initial_motor_r: MotorWheelState = MotorWheelState(0.0, 0.0)
    initial_motor_l: MotorWheelState = MotorWheelState(0.0, 0.0)
    motor: MotorParams = field(default_factory=lambda: DEFAULT_MOTOR)
    robot: RobotParams = field(default_factory=lambda: DEFAULT_ROBOT)
    measurement_noise: Optional[Callable[[float], tuple[float, float]]] = None

    def __post_init__(self):
        if not self.duration_s > 0.0:
            raise ValueError("duration_s must be > 0")
        if not self.log_step_s > 0.0:
            raise ValueError("log_step_s must be > 0")


@dataclass
class SimLog:
    """Uniform-grid time series for one run; column names follow
    CSV_COLUMNS and every series has the grid's length."""

    series: dict

    def __getitem__(self, name: str) -> np.ndarray:
        return self.series[name]

    @property
    def t(self) -> np.ndarray:
        return self.series["t"]

    def to_csv(self, path) -> None:
        """Write all columns; 17 significant digits so values round-trip
        exactly."""
        cols = [self.series[name] for name in CSV_COLUMNS]
        n = len(cols[0])
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for i in range(n):
                fh.write(",".join("%.17g" % c[i] for c in cols) + "\n")

    @classmethod
    def from_csv(cls, path) -> "SimLog":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if tuple(header) != CSV_COLUMNS:
                raise ValueError(f"unexpected CSV header in {path}")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        if data.shape[1] != len(CSV_COLUMNS):
            raise ValueError(f"unexpected column count in {path}")
        return cls(series={
            name: data[:, j].copy() for j, name in enumerate(CSV_COLUMNS)
        })


def _as_ref_fn(ref: ReferenceSignal) -> Callable[[float], float]:
    if isinstance(ref, (int, float)):
        v = float(ref)
        return lambda t: v
    pts = sorted((float(a), float(b)) for a, b in ref)
    if not pts:
        raise ValueError("empty reference schedule")
    starts = [a for a, _ in pts]
    vals = [b for _, b in pts]

    def fn(t: float) -> float:
        v = vals[0]
        for s, x in zip(starts, vals):
            if t >= s:
                v = x
            else:
                break
        return v

    return fn


def _pulse_value(t: float, prof: DisturbanceProfile) -> float:
    return prof.magnitude if prof.t_on <= t < prof.t_off else 0.0


def _make_rhs(scenario: Scenario, cfg: ControllerConfig):
    """Specialized derivative closure for one scenario/controller pair.

    The hot path is inlined scalar math (no tuple/dataclass churn inside
    the 4-stage integrator loop); it mirrors the public per-module
    functions operation for operation, and a regression test pins the two
    paths to bit-identical outputs.
    """
    mp = scenario.motor
    rp = scenario.robot
    prof = scenario.disturbance
    improved = cfg.variant == "improved_adrc"

    # motor/robot constants
    c_bj = mp.B_eq / mp.J_eq
    c_ktjn = mp.k_t / (mp.J_eq * mp.n)
    c_jn = mp.J_eq * mp.n
    c_kbnl = mp.k_b * mp.n / mp.L_a
    c_rl = mp.R_a / mp.L_a
    l_a = mp.L_a
    n_gear = mp.n
    r_w, track = rp.r_w, rp.D

    # disturbance pulse
    mag, t_on, t_off = prof.magnitude, prof.t_on, prof.t_off
    dist_r = prof.target in ("right", "both")
    dist_l = prof.target in ("left", "both")

    b_hat = cfg.b_hat
    use_dist = cfg.use_disturbance_estimate
    ref_fn_r = _as_ref_fn(scenario.ref_omega_r)
    ref_fn_l = _as_ref_fn(scenario.ref_omega_l)
    noise = scenario.measurement_noise

    cos = math.cos
    sin = math.sin
    exp = math.exp
    tanh = math.tanh

    if improved:
        td_p, sef, eso = cfg.td, cfg.sef, cfg.eso
        R, beta_td, gamma_td = td_p.R, td_p.beta, td_p.gamma
        R2 = td_p.R * td_p.R
        one_m_alpha = 1.0 - td_p.alpha
        g_td = td_p.output_gain
        k11, k12, k21, k22 = sef.k11, sef.k12, sef.k21, sef.k22
        mu1, mu2 = sef.mu1, sef.mu2
        al1, al2, al3 = sef.alpha1, sef.alpha2, sef.alpha3
        k3, delta = sef.k3, sef.delta
        ka, a_obs, kb, b_obs = eso.K_alpha, eso.alpha_obs, eso.K_beta, eso.beta_obs
        ob1, ob2, ob3 = eso.beta1, eso.beta2, eso.beta3

        def channel(t, w, ia, xh1, xh2, xh3, r1, r2, eint, ref, nz, dist_on):
            # tanh TD
            r2dot = -R2 * tanh((beta_td * r1 - one_m_alpha * ref) / gamma_td) - R * r2
            # errors against observer estimates
            e0 = r1 * g_td - xh1
            e1 = r2 * g_td - xh2
            # sector-gain feedback
            a = mu1 * e0 * e0
            g0 = k11 if a > 700.0 else k11 + k12 / (1.0 + exp(a))
            a = mu2 * e1 * e1
            g1 = k21 if a > 700.0 else k21 + k22 / (1.0 + exp(a))
            f0 = e0 ** al1 if e0 > 0.0 else (-((-e0) ** al1) if e0 < 0.0 else 0.0)
            f1 = e1 ** al2 if e1 > 0.0 else (-((-e1) ** al2) if e1 < 0.0 else 0.0)
            fi = eint ** al3 if eint > 0.0 else (-((-eint) ** al3) if eint < 0.0 else 0.0)
            u0 = g0 * f0
            u0 += g1 * f1
            ui = k3 * fi
            if ui > delta:
                ui = delta
            elif ui < -delta:
                ui = -delta
            u0 = u0 + ui
            u = (u0 - (xh3 if use_dist else 0.0)) / b_hat
            # sliding-mode observer
            e_in = (w + nz) - xh1
            if e_in == 0.0:
                g = 0.0
            else:
                m = abs(e_in)
                sgn = 1.0 if e_in > 0.0 else -1.0
                g = ka * m ** a_obs * sgn + kb * m ** b_obs * e_in
            od1 = xh2 + ob1 * g
            od2 = xh3 + b_hat * u + ob2 * g
            od3 = ob3 * g
            # motor
            tau = mag if (dist_on and t_on <= t < t_off) else 0.0
            d = tau / n_gear
            wdot = -c_bj * w + c_ktjn * ia - d / c_jn
            idot = -c_kbnl * w - c_rl * ia + u / l_a
            return wdot, idot, od1, od2, od3, r2, r2dot, e0
    else:
        td_p, sef, eso = cfg.td, cfg.sef, cfg.eso
        R = td_p.R
        two_r = 2.0 * td_p.R
        k1, k2 = sef.k1, sef.k2
        al1, al2 = sef.alpha1, sef.alpha2
        d1, d2 = sef.delta1, sef.delta2
        dpow1 = sef.delta1 ** (1.0 - sef.alpha1)
        dpow2 = sef.delta2 ** (1.0 - sef.alpha2)
        ob1, ob2, ob3 = eso.beta1, eso.beta2, eso.beta3

        def channel(t, w, ia, xh1, xh2, xh3, r1, r2, eint, ref, nz, dist_on):
            # time-optimal sign TD
            aa = r1 - ref + r2 * abs(r2) / two_r
            r2dot = -R if aa > 0.0 else (R if aa < 0.0 else 0.0)
            e0 = r1 - xh1
            e1 = r2 - xh2
            # fal feedback
            f0 = (e0 / dpow1 if abs(e0) <= d1
                  else (e0 ** al1 if e0 > 0.0 else -((-e0) ** al1)))
            f1 = (e1 / dpow2 if abs(e1) <= d2
                  else (e1 ** al2 if e1 > 0.0 else -((-e1) ** al2)))
            u0 = k1 * f0 + k2 * f1
            u = (u0 - (xh3 if use_dist else 0.0)) / b_hat
            # linear observer
            e_in = (w + nz) - xh1
            od1 = xh2 + ob1 * e_in
            od2 = xh3 + b_hat * u + ob2 * e_in
            od3 = ob3 * e_in
            # motor
            tau = mag if (dist_on and t_on <= t < t_off) else 0.0
            d = tau / n_gear
            wdot = -c_bj * w + c_ktjn * ia - d / c_jn
            idot = -c_kbnl * w - c_rl * ia + u / l_a
            return wdot, idot, od1, od2, od3, r2, r2dot, e0

    nan_channel = (math.nan,) * 8

    def rhs(t: float, s: np.ndarray) -> np.ndarray:
        (wr, iar, xh1r, xh2r, xh3r, r1r, r2r, eir,
         wl, ial, xh1l, xh2l, xh3l, r1l, r2l, eil,
         px, py, th) = s.tolist()
        if noise is not None:
            nz_r, nz_l = noise(t)
        else:
            nz_r = nz_l = 0.0
        # Python pow raises instead of returning inf on a diverging state;
        # turn that into NaNs so the integrator reports the subsystem.
        try:
            d_r = channel(t, wr, iar, xh1r, xh2r, xh3r, r1r, r2r, eir,
                          ref_fn_r(t), nz_r, dist_r)
        except OverflowError:
            d_r = nan_channel
        try:
            d_l = channel(t, wl, ial, xh1l, xh2l, xh3l, r1l, r2l, eil,
                          ref_fn_l(t), nz_l, dist_l)
        except OverflowError:
            d_l = nan_channel
        v_m = r_w * (wr + wl) / 2.0
        om_m = r_w * (wr - wl) / track
        return np.array(d_r + d_l + (v_m * cos(th), v_m * sin(th), om_m))

    return rhs


def _initial_state(scenario: Scenario) -> np.ndarray:
    s0 = np.zeros(N_STATES)
    nz_r = nz_l = 0.0
    if scenario.measurement_noise is not None:
        nz_r, nz_l = scenario.measurement_noise(0.0)
    for base, motor0, nz in (
        (0, scenario.initial_motor_r, nz_r),
        (_LEFT, scenario.initial_motor_l, nz_l),
    ):
        s0[base + _W] = motor0.omega_w
        s0[base + _IA] = motor0.i_a
        # Observer starts from the measured output; the remaining
        # estimates start at zero.
        s0[base + _XH1] = motor0.omega_w + nz
    s0[_POSE:_POSE + 3] = scenario.initial_pose
    return s0


def reference_trajectory(scenario: Scenario) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pose series the robot would trace following the reference wheel
    speeds exactly (pure kinematics, no dynamics, no disturbance), from the
    same initial pose on the same log grid.  Returns (x_ref, y_ref,
    theta_ref)."""
    ref_fn_r = _as_ref_fn(scenario.ref_omega_r)
    ref_fn_l = _as_ref_fn(scenario.ref_omega_l)
    rp = scenario.robot

    def rhs(t: float, s: np.ndarray) -> np.ndarray:
        v_m, om_m = body_velocities(ref_fn_r(t), ref_fn_l(t), rp)
        pd = kinematics_derivatives(Pose(s[0], s[1], s[2]), v_m, om_m)
        return np.array(pd)

    _, states = integrate_logged(
        rhs,
        np.array(scenario.initial_pose, dtype=float),
        0.0,
        scenario.duration_s,
        scenario.integrator,
        scenario.log_step_s,
    )
    return states[:, 0], states[:, 1], states[:, 2]


def run_closed_loop(scenario: Scenario, cfg: ControllerConfig) -> SimLog:
    """Simulate the full loop and return the logged series.

    Raises SimulationError naming the failing time and subsystem if the
    integration produces a non-finite state.
    """
    rhs = _make_rhs(scenario, cfg)
    try:
        times, states = integrate_logged(
            rhs,
            _initial_state(scenario),
            0.0,
            scenario.duration_s,
            scenario.integrator,
            scenario.log_step_s,
        )
    except IntegrationError as err:
        subsystem = (
            _SUBSYSTEMS[err.entry_index]
            if 0 <= err.entry_index < N_STATES
            else "integrator"
        )
        raise SimulationError(
            err.t, subsystem, f"simulation failed at t={err.t:.6g} s in the "
            f"{subsystem} subsystem: {err}"
        ) from err

    x_ref, y_ref, theta_ref = reference_trajectory(scenario)

    n = len(times)
    log = {name: np.empty(n) for name in CSV_COLUMNS}
    log["t"] = times
    ref_fn_r = _as_ref_fn(scenario.ref_omega_r)
    ref_fn_l = _as_ref_fn(scenario.ref_omega_l)
    improved = cfg.variant == "improved_adrc"
    g_td = cfg.td.output_gain if improved else 1.0

    for i, t in enumerate(times):
        s = states[i]
        for prefix, base in (("r", 0), ("l", _LEFT)):
            obs = ObserverState(
                s[base + _XH1], s[base + _XH2], s[base + _XH3]
            )
            u, _ = adrc_control_step(
                s[base + _R1] * g_td, s[base + _R2] * g_td, obs, cfg,
                s[base + _EINT],
            )
            log[f"u{prefix}"][i] = u
            log[f"r1_{prefix}"][i] = s[base + _R1] * g_td
            log[f"r2_{prefix}"][i] = s[base + _R2] * g_td
            log[f"xhat1_{prefix}"][i] = s[base + _XH1]
            log[f"xhat2_{prefix}"][i] = s[base + _XH2]
            log[f"xhat3_{prefix}"][i] = s[base + _XH3]
        log["wr_ref"][i] = ref_fn_r(t)
        log["wl_ref"][i] = ref_fn_l(t)
        log["tau_ext"][i] = _pulse_value(t, scenario.disturbance)

    log["wr"] = states[:, _W]
    log["iar"] = states[:, _IA]
    log["wl"] = states[:, _LEFT + _W]
    log["ial"] = states[:, _LEFT + _IA]
    log["x"] = states[:, _POSE]
    log["y"] = states[:, _POSE + 1]
    log["theta"] = states[:, _POSE + 2]
    log["x_ref"] = x_ref
    log["y_ref"] = y_ref
    log["theta_ref"] = theta_ref
    log["e_theta"] = theta_ref - states[:, _POSE + 2]
    return SimLog(series=log)
