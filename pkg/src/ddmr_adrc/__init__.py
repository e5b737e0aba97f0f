"""Closed-loop wheel-speed control benchmark for a differential drive
mobile robot: classical and improved active disturbance rejection
controllers over PMDC motor-wheel dynamics, with performance indices and a
CSV-logging CLI."""

from .adrc import (
    CanonicalPlantForms,
    ControlDiagnostics,
    ControllerConfig,
    DegenerateTransformError,
    adrc_control_step,
    canonical_acceleration,
    matched_transform,
)
from .metrics import PerformanceReport, isu, itae, opi, peak_abs, report_from_log, total_variation
from .numerics import (
    IntegrationError,
    IntegratorConfig,
    StepSizeUnderflowError,
    central_difference,
    integrate_logged,
    rk4_step,
    rk45_step,
    second_central_difference,
)
from .observers import (
    LesoParams,
    ObserverState,
    SmesoParams,
    leso_derivatives,
    smeso_derivatives,
    smeso_gain,
)
from .plant import (
    DisturbanceProfile,
    MotorParams,
    MotorWheelState,
    Pose,
    RobotParams,
    body_velocities,
    disturbance_at,
    kinematics_derivatives,
    motor_derivatives,
    motor_transform_inputs,
)
from .simulation import (
    DEFAULT_MOTOR,
    DEFAULT_ROBOT,
    Scenario,
    SimLog,
    SimulationError,
    reference_trajectory,
    run_closed_loop,
)
from .state_error_feedback import (
    ErrorVector,
    FalNlsefParams,
    InlsefParams,
    error_power,
    fal,
    fal_nlsef_control,
    inlsef_control,
    nonlinear_gain,
)
from .tracking_differentiator import (
    HanTdParams,
    IntdParams,
    TdState,
    han_td_derivatives,
    intd_derivatives,
    td_track,
)

__version__ = "0.1.0"
