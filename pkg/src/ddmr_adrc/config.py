"""Sectioned key-value run configuration: schema, defaults and loading.

The file format is INI-style with the sections [motor], [robot],
[scenario], [integrator], [controller.td], [controller.sef] and
[controller.eso].  Keys carry the benchmark's parameter symbols
(snake-cased, prefixed by sub-unit where the two controller variants use
the same symbol for different quantities).  Every key has a documented
default; provenance marks whether that default comes from the published
benchmark tuning ("published"), is an artifact choice the publication does
not specify ("artifact"), or is derived from other parameters ("derived").
Values set in a file are flagged "override".
"""

import configparser
from dataclasses import dataclass
from typing import Optional

from .adrc import ControllerConfig, matched_transform
from .numerics import IntegratorConfig
from .observers import LesoParams, SmesoParams
from .plant import (
    DisturbanceProfile,
    MotorParams,
    MotorWheelState,
    Pose,
    RobotParams,
    motor_transform_inputs,
)
from .simulation import Scenario
from .state_error_feedback import FalNlsefParams, InlsefParams
from .tracking_differentiator import HanTdParams, IntdParams

PUBLISHED = "published"
ARTIFACT = "artifact"
DERIVED = "derived"
OVERRIDE = "override"

VARIANTS = ("adrc", "iadrc")


class ConfigError(ValueError):
    """Invalid run configuration; message names the section and key."""

    def __init__(self, section: str, key: Optional[str], message: str):
        self.section = section
        self.key = key
        where = f"[{section}]" + (f" {key}" if key else "")
        super().__init__(f"{where}: {message}")


def _parse_bool(raw: str) -> bool:
    v = raw.strip().lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_float(raw: str) -> float:
    return float(raw)


def _parse_str(raw: str) -> str:
    return raw.strip()


@dataclass(frozen=True)
class _Param:
    default: Optional[str]   # None means derived after the rest is parsed
    provenance: str
    parse: callable
    help: str


# Schema: section -> key -> _Param.  Defaults are strings exactly as they
# would appear in a file.
SCHEMA: dict[str, dict[str, _Param]] = {
    "motor": {
        "r_a": _Param("0.1557", PUBLISHED, _parse_float, "armature resistance [ohm]"),
        "l_a": _Param("0.82", PUBLISHED, _parse_float, "armature inductance [H]"),
        "k_b": _Param("1.185", PUBLISHED, _parse_float, "back-EMF constant [V*s/rad]"),
        "k_t": _Param("1.1882", PUBLISHED, _parse_float, "torque constant [N*m/A]"),
        "n": _Param("3.0", PUBLISHED, _parse_float, "gearbox ratio [-]"),
        "j_eq": _Param("0.2752", PUBLISHED, _parse_float, "equivalent inertia [kg*m^2]"),
        "b_eq": _Param("0.3922", PUBLISHED, _parse_float, "equivalent damping [N*m*s/rad]"),
    },
    "robot": {
        "d": _Param("0.40", PUBLISHED, _parse_float, "wheel-track width [m]"),
        "r_w": _Param("0.075", PUBLISHED, _parse_float, "wheel radius [m]"),
    },
    "scenario": {
        "ref_omega_r": _Param("1.0", PUBLISHED, _parse_float, "right wheel speed reference [rad/s]"),
        "ref_omega_l": _Param("1.0", PUBLISHED, _parse_float, "left wheel speed reference [rad/s]"),
        "duration_s": _Param("100.0", PUBLISHED, _parse_float, "simulation horizon [s]"),
        "log_step_s": _Param("0.01", ARTIFACT, _parse_float, "logging grid step [s]"),
        "disturbance_magnitude": _Param("2.0", ARTIFACT, _parse_float, "external torque pulse height [N*m] (not a published value)"),
        "disturbance_t_on": _Param("30.0", PUBLISHED, _parse_float, "pulse start, inclusive [s]"),
        "disturbance_t_off": _Param("50.0", PUBLISHED, _parse_float, "pulse end, exclusive [s]"),
        "disturbance_target": _Param("right", PUBLISHED, _parse_str, "wheel(s) the pulse acts on: right|left|both"),
        "init_omega_r": _Param("0.0", ARTIFACT, _parse_float, "initial right wheel speed [rad/s]"),
        "init_omega_l": _Param("0.0", ARTIFACT, _parse_float, "initial left wheel speed [rad/s]"),
        "init_i_r": _Param("0.0", ARTIFACT, _parse_float, "initial right armature current [A]"),
        "init_i_l": _Param("0.0", ARTIFACT, _parse_float, "initial left armature current [A]"),
        "init_x": _Param("0.0", ARTIFACT, _parse_float, "initial pose x [m]"),
        "init_y": _Param("0.0", ARTIFACT, _parse_float, "initial pose y [m]"),
        "init_theta": _Param("0.7853981633974483", ARTIFACT, _parse_float, "initial heading [rad]; pi/4 so track errors project on both axes"),
    },
    "integrator": {
        "method": _Param("rk4_fixed", ARTIFACT, _parse_str, "rk4_fixed | rk45_adaptive"),
        "step_s": _Param("0.001", ARTIFACT, _parse_float, "fixed step / initial adaptive step [s]"),
        "abs_tol": _Param("1e-8", ARTIFACT, _parse_float, "adaptive absolute tolerance [-]"),
        "rel_tol": _Param("1e-8", ARTIFACT, _parse_float, "adaptive relative tolerance [-]"),
        "min_step_s": _Param("1e-9", ARTIFACT, _parse_float, "adaptive minimum step [s]"),
        "max_step_s": _Param("1.0", ARTIFACT, _parse_float, "adaptive maximum step [s]"),
    },
    "controller.td": {
        "han_r": _Param("100.0", PUBLISHED, _parse_float, "classical TD speed factor R [1/s]"),
        "intd_alpha": _Param("0.4968", PUBLISHED, _parse_float, "tanh-TD alpha, 0 < alpha < 1 [-]"),
        "intd_beta": _Param("2.1555", PUBLISHED, _parse_float, "tanh-TD beta > 1 [-]"),
        "intd_gamma": _Param("11.9554", PUBLISHED, _parse_float, "tanh-TD gamma > 0 [-]"),
        "intd_r": _Param("16.8199", PUBLISHED, _parse_float, "tanh-TD speed factor R [1/s]"),
        "intd_normalize_output": _Param("true", ARTIFACT, _parse_bool, "rescale TD outputs to unity DC gain (the raw equations settle at (1-alpha)/beta of the input)"),
    },
    "controller.sef": {
        "fal_alpha1": _Param("0.1726", PUBLISHED, _parse_float, "classical fal exponent on e0 [-]"),
        "fal_alpha2": _Param("0.8730", PUBLISHED, _parse_float, "classical fal exponent on e1 [-]"),
        "fal_delta1": _Param("0.4620", PUBLISHED, _parse_float, "classical fal linear-zone width on e0 [-]"),
        "fal_delta2": _Param("0.24807", PUBLISHED, _parse_float, "classical fal linear-zone width on e1 [-]"),
        "fal_k1": _Param("4.0", ARTIFACT, _parse_float, "classical gain on fal(e0) (not a published value)"),
        "fal_k2": _Param("10.0", ARTIFACT, _parse_float, "classical gain on fal(e1) (not a published value)"),
        "inlsef_k11": _Param("144.6642", PUBLISHED, _parse_float, "sector-gain floor on e0 [-]"),
        "inlsef_k12": _Param("8.0475", PUBLISHED, _parse_float, "sector-gain span on e0 [-]"),
        "inlsef_k21": _Param("25.5574", PUBLISHED, _parse_float, "sector-gain floor on e1 [-]"),
        "inlsef_k22": _Param("4.8814", PUBLISHED, _parse_float, "sector-gain span on e1 [-]"),
        "inlsef_mu1": _Param("44.3160", PUBLISHED, _parse_float, "sector-gain shape on e0 [-]"),
        "inlsef_mu2": _Param("48.8179", PUBLISHED, _parse_float, "sector-gain shape on e1 [-]"),
        "inlsef_mu3": _Param("26.1493", PUBLISHED, _parse_float, "carried for completeness; unused by the integral term [-]"),
        "inlsef_alpha1": _Param("0.9675", PUBLISHED, _parse_float, "error-power exponent on e0 [-]"),
        "inlsef_alpha2": _Param("1.4487", PUBLISHED, _parse_float, "error-power exponent on e1 [-]"),
        "inlsef_alpha3": _Param("3.5032", PUBLISHED, _parse_float, "error-power exponent on the integral [-]"),
        "inlsef_k3": _Param("0.5308", PUBLISHED, _parse_float, "integral gain [-]"),
        "inlsef_delta": _Param("3.8831", PUBLISHED, _parse_float, "integral-term saturation bound [V]"),
    },
    "controller.eso": {
        "leso_beta1": _Param("30.4", PUBLISHED, _parse_float, "linear observer gain 1 [1/s]"),
        "leso_beta2": _Param("523.4", PUBLISHED, _parse_float, "linear observer gain 2 [1/s^2]"),
        "leso_beta3": _Param("2970.8", PUBLISHED, _parse_float, "linear observer gain 3 [1/s^3]"),
        "smeso_k_alpha": _Param("0.6265", PUBLISHED, _parse_float, "sliding-mode gain K_alpha [-]"),
        "smeso_alpha": _Param("0.8433", PUBLISHED, _parse_float, "sliding-mode exponent alpha, (0,1] [-]"),
        "smeso_k_beta": _Param("0.5878", PUBLISHED, _parse_float, "sliding-mode gain K_beta [-]"),
        "smeso_beta": _Param("0.04078", PUBLISHED, _parse_float, "sliding-mode exponent beta >= 0 [-]"),
        "smeso_beta1": _Param("30.4", PUBLISHED, _parse_float, "sliding-mode observer gain 1 [1/s]"),
        "smeso_beta2": _Param("513.4", PUBLISHED, _parse_float, "sliding-mode observer gain 2 [1/s^2]"),
        "smeso_beta3": _Param("1570.8", PUBLISHED, _parse_float, "sliding-mode observer gain 3 [1/s^3]"),
        "b_hat": _Param(None, DERIVED, _parse_float, "canonical input gain; default (1/l_a)*(k_t/(j_eq*n)) from [motor]"),
    },
}

# Keys meaningful to only one controller variant; an explicit override of a
# key exclusive to the *other* variant is rejected by single-variant runs.
_VARIANT_PREFIXES = {
    "adrc": ("han_", "fal_", "leso_"),
    "iadrc": ("intd_", "inlsef_", "smeso_"),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameter bundle for one experiment file."""

    values: dict
    overridden: frozenset

    def value(self, section: str, key: str):
        return self.values[(section, key)]

    def provenance(self, section: str, key: str) -> str:
        if (section, key) in self.overridden:
            return OVERRIDE
        return SCHEMA[section][key].provenance

    # -- typed sub-bundles -------------------------------------------------

    def motor_params(self) -> MotorParams:
        v = self.value
        try:
            return MotorParams(
                R_a=v("motor", "r_a"), L_a=v("motor", "l_a"),
                k_b=v("motor", "k_b"), k_t=v("motor", "k_t"),
                n=v("motor", "n"), J_eq=v("motor", "j_eq"),
                B_eq=v("motor", "b_eq"),
            )
        except ValueError as err:
            raise ConfigError("motor", None, str(err)) from err

    def robot_params(self) -> RobotParams:
        try:
            return RobotParams(
                D=self.value("robot", "d"), r_w=self.value("robot", "r_w")
            )
        except ValueError as err:
            raise ConfigError("robot", None, str(err)) from err

    def integrator_config(self) -> IntegratorConfig:
        v = self.value
        try:
            return IntegratorConfig(
                method=v("integrator", "method"),
                step_s=v("integrator", "step_s"),
                abs_tol=v("integrator", "abs_tol"),
                rel_tol=v("integrator", "rel_tol"),
                min_step_s=v("integrator", "min_step_s"),
                max_step_s=v("integrator", "max_step_s"),
            )
        except ValueError as err:
            raise ConfigError("integrator", None, str(err)) from err

    def scenario(self) -> Scenario:
        v = self.value
        try:
            disturbance = DisturbanceProfile(
                magnitude=v("scenario", "disturbance_magnitude"),
                t_on=v("scenario", "disturbance_t_on"),
                t_off=v("scenario", "disturbance_t_off"),
                target=v("scenario", "disturbance_target"),
            )
            return Scenario(
                ref_omega_r=v("scenario", "ref_omega_r"),
                ref_omega_l=v("scenario", "ref_omega_l"),
                duration_s=v("scenario", "duration_s"),
                disturbance=disturbance,
                log_step_s=v("scenario", "log_step_s"),
                integrator=self.integrator_config(),
                initial_pose=Pose(
                    v("scenario", "init_x"), v("scenario", "init_y"),
                    v("scenario", "init_theta"),
                ),
                initial_motor_r=MotorWheelState(
                    v("scenario", "init_omega_r"), v("scenario", "init_i_r")
                ),
                initial_motor_l=MotorWheelState(
                    v("scenario", "init_omega_l"), v("scenario", "init_i_l")
                ),
                motor=self.motor_params(),
                robot=self.robot_params(),
            )
        except ConfigError:
            raise
        except ValueError as err:
            raise ConfigError("scenario", None, str(err)) from err

    def b_hat(self) -> float:
        return self.value("controller.eso", "b_hat")

    def controller(self, variant: str) -> ControllerConfig:
        """Build the controller bundle for 'adrc' or 'iadrc'."""
        if variant not in VARIANTS:
            raise ConfigError(
                "controller", None, f"unknown controller variant {variant!r}"
            )
        v = self.value
        b_hat = self.b_hat()

        def build(section, ctor, **kwargs):
            try:
                return ctor(**kwargs)
            except ValueError as err:
                raise ConfigError(section, None, str(err)) from err

        if variant == "adrc":
            td = build("controller.td", HanTdParams,
                       R=v("controller.td", "han_r"))
            sef = build(
                "controller.sef", FalNlsefParams,
                alpha1=v("controller.sef", "fal_alpha1"),
                alpha2=v("controller.sef", "fal_alpha2"),
                delta1=v("controller.sef", "fal_delta1"),
                delta2=v("controller.sef", "fal_delta2"),
                k1=v("controller.sef", "fal_k1"),
                k2=v("controller.sef", "fal_k2"),
            )
            eso = build(
                "controller.eso", LesoParams,
                beta1=v("controller.eso", "leso_beta1"),
                beta2=v("controller.eso", "leso_beta2"),
                beta3=v("controller.eso", "leso_beta3"),
                b_hat=b_hat,
            )
            return build(
                "controller", ControllerConfig,
                variant="classical_adrc", td=td, sef=sef, eso=eso,
                b_hat=b_hat,
            )
        td = build(
            "controller.td", IntdParams,
            alpha=v("controller.td", "intd_alpha"),
            beta=v("controller.td", "intd_beta"),
            gamma=v("controller.td", "intd_gamma"),
            R=v("controller.td", "intd_r"),
            normalize_output=v("controller.td", "intd_normalize_output"),
        )
        sef = build(
            "controller.sef", InlsefParams,
            k11=v("controller.sef", "inlsef_k11"),
            k12=v("controller.sef", "inlsef_k12"),
            k21=v("controller.sef", "inlsef_k21"),
            k22=v("controller.sef", "inlsef_k22"),
            mu1=v("controller.sef", "inlsef_mu1"),
            mu2=v("controller.sef", "inlsef_mu2"),
            mu3=v("controller.sef", "inlsef_mu3"),
            alpha1=v("controller.sef", "inlsef_alpha1"),
            alpha2=v("controller.sef", "inlsef_alpha2"),
            alpha3=v("controller.sef", "inlsef_alpha3"),
            k3=v("controller.sef", "inlsef_k3"),
            delta=v("controller.sef", "inlsef_delta"),
        )
        eso = build(
            "controller.eso", SmesoParams,
            K_alpha=v("controller.eso", "smeso_k_alpha"),
            alpha_obs=v("controller.eso", "smeso_alpha"),
            K_beta=v("controller.eso", "smeso_k_beta"),
            beta_obs=v("controller.eso", "smeso_beta"),
            beta1=v("controller.eso", "smeso_beta1"),
            beta2=v("controller.eso", "smeso_beta2"),
            beta3=v("controller.eso", "smeso_beta3"),
            b_hat=b_hat,
        )
        return build(
            "controller", ControllerConfig,
            variant="improved_adrc", td=td, sef=sef, eso=eso, b_hat=b_hat,
        )

    def check_variant_consistency(self, variant: str) -> None:
        """Reject explicit overrides of keys exclusive to the other
        controller variant for single-variant runs."""
        other = "iadrc" if variant == "adrc" else "adrc"
        for (section, key) in sorted(self.overridden):
            if key.startswith(_VARIANT_PREFIXES[other]):
                raise ConfigError(
                    section, key,
                    f"set in the file but belongs to the {other} variant; "
                    f"this run uses {variant}",
                )


def derived_b_hat(mp: MotorParams) -> float:
    """Canonical input gain of the motor model via the matched transform."""
    ti = motor_transform_inputs(mp)
    forms = matched_transform(
        ti.f1, ti.f2, ti.b1, ti.b2, ti.df1_dx1, ti.df1_dx2
    )
    return forms.b_hat


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """Parse a config file (or just the defaults when path is None).

    Unknown sections or keys are rejected; every value is parsed and
    range-checked through the same constructors the simulation uses.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep keys verbatim so errors cite them
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                parser.read_file(fh)
            except configparser.Error as err:
                raise ConfigError("file", None, f"cannot parse: {err}") from err

    values: dict = {}
    overridden = set()

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(section, None, "unknown section")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(section, key, "unknown key")

    for section, params in SCHEMA.items():
        for key, spec in params.items():
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                overridden.add((section, key))
            else:
                raw = spec.default
            if raw is None:
                values[(section, key)] = None  # derived below
                continue
            try:
                values[(section, key)] = spec.parse(raw)
            except ValueError as err:
                raise ConfigError(section, key, str(err)) from err

    if values[("controller.eso", "b_hat")] is None:
        motor = RunConfig(values=dict(values), overridden=frozenset())
        values[("controller.eso", "b_hat")] = derived_b_hat(motor.motor_params())
    if values[("controller.eso", "b_hat")] == 0.0:
        raise ConfigError("controller.eso", "b_hat", "must be non-zero")

    rc = RunConfig(values=values, overridden=frozenset(overridden))

    # Fail fast on every sub-bundle so validation catches range errors
    # regardless of which command runs next.
    rc.scenario()
    for variant in VARIANTS:
        rc.controller(variant)
    return rc


def resolved_table(rc: RunConfig) -> list[tuple[str, str, str, str, str]]:
    """(section, key, resolved value, provenance, help) rows in schema
    order, for the validate command."""
    rows = []
    for section, params in SCHEMA.items():
        for key, spec in params.items():
            val = rc.value(section, key)
            rows.append((section, key, repr(val), rc.provenance(section, key),
                         spec.help))
    return rows
