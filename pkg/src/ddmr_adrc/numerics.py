"""Fixed-step RK4 and adaptive Dormand-Prince RK45 integration.

All integrators work on flat float64 state vectors and user-supplied vector
fields ``f(t, x) -> dx/dt``.  Everything here is a pure function of its
inputs, so repeated runs are bit-identical and parallel sweeps need no
synchronization.  Finite-difference helpers live here too because the test
oracles for the closed-loop consistency checks are built on them.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

VectorField = Callable[[float, np.ndarray], np.ndarray]

# Dormand-Prince 5(4) tableau (standard published coefficients).
_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
# 5th-order weights (propagated) and 4th-order embedded weights.
_DP_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
          -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
_DP_B4 = (5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0)

_SAFETY = 0.9
_SHRINK_LIMIT = 0.2
_GROW_LIMIT = 5.0


class IntegrationError(RuntimeError):
    """A step produced a non-finite state entry."""

    def __init__(self, t: float, entry_index: int, message: str | None = None):
        self.t = t
        self.entry_index = entry_index
        super().__init__(
            message
            or f"non-finite value in state entry {entry_index} at t={t:.9g}"
        )


class StepSizeUnderflowError(IntegrationError):
    """The adaptive step controller asked for a step below min_step_s."""

    def __init__(self, t: float, h: float, min_step_s: float):
        self.h = h
        self.min_step_s = min_step_s
        super().__init__(
            t, -1,
            f"required step {h:.3e} s below min_step_s={min_step_s:.3e} s "
            f"at t={t:.9g}",
        )


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration method and step/tolerance settings.

    step_s is the fixed step for rk4_fixed and the initial step for
    rk45_adaptive.  Tolerances are the usual mixed absolute/relative error
    weights for the adaptive controller.
    """

    method: str = "rk4_fixed"
    step_s: float = 1e-3
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    min_step_s: float = 1e-9
    max_step_s: float = 1.0

    def __post_init__(self):
        if self.method not in ("rk4_fixed", "rk45_adaptive"):
            raise ValueError(f"unknown integration method {self.method!r}")
        if not self.step_s > 0:
            raise ValueError("step_s must be > 0")
        if not (0 < self.min_step_s <= self.max_step_s):
            raise ValueError("need 0 < min_step_s <= max_step_s")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be > 0")


def _raise_non_finite(t: float, x: np.ndarray):
    bad = np.flatnonzero(~np.isfinite(x))
    raise IntegrationError(t, int(bad[0]) if bad.size else -1)


def rk4_step(f: VectorField, t: float, x: np.ndarray, h: float) -> np.ndarray:
    """Advance x by one classical 4-stage Runge-Kutta step of size h."""
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = f(t + h, x + h * k3)
    out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.isfinite(out).all():
        _raise_non_finite(t, out)
    return out


def rk45_step(
    f: VectorField,
    t: float,
    x: np.ndarray,
    h: float,
    cfg: IntegratorConfig,
) -> tuple[np.ndarray, float, float]:
    """One embedded Dormand-Prince 5(4) step.

    Returns ``(x5, error_estimate, h_next)`` where x5 is the 5th-order
    solution, error_estimate the scaled norm of the 5th-vs-4th order
    difference (<= 1 means the step meets tolerance) and h_next the
    controller's suggestion h * clamp(0.9 * error^(-1/5), 0.2, 5.0).
    """
    k = [f(t, x)]
    for i in range(1, 7):
        xi = x.copy()
        a = _DP_A[i]
        for j in range(i):
            if a[j] != 0.0:
                xi = xi + (h * a[j]) * k[j]
        k.append(f(t + _DP_C[i] * h, xi))

    x5 = x.copy()
    diff = np.zeros_like(x)
    for i in range(7):
        if _DP_B5[i] != 0.0:
            x5 = x5 + (h * _DP_B5[i]) * k[i]
        w = _DP_B5[i] - _DP_B4[i]
        if w != 0.0:
            diff = diff + (h * w) * k[i]

    if not np.isfinite(x5).all():
        _raise_non_finite(t, x5)

    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(x), np.abs(x5))
    error_estimate = float(np.sqrt(np.mean((diff / scale) ** 2)))

    if error_estimate == 0.0:
        factor = _GROW_LIMIT
    else:
        factor = min(
            _GROW_LIMIT,
            max(_SHRINK_LIMIT, _SAFETY * error_estimate ** -0.2),
        )
    h_next = h * factor
    return x5, error_estimate, h_next


def log_grid(t0: float, t_end: float, log_step_s: float) -> np.ndarray:
    """Uniform sample instants t0, t0+log_step, ..., including t_end."""
    if t_end < t0:
        raise ValueError("t_end must be >= t0")
    if not log_step_s > 0:
        raise ValueError("log_step_s must be > 0")
    if t_end == t0:
        return np.array([t0])
    span = t_end - t0
    n = int(np.floor(span / log_step_s * (1.0 + 1e-12)))
    times = t0 + log_step_s * np.arange(n + 1)
    if t_end - times[-1] > 1e-9 * max(1.0, abs(t_end)):
        times = np.append(times, t_end)
    else:
        times[-1] = t_end
    return times


def integrate_logged(
    f: VectorField,
    x0: np.ndarray,
    t0: float,
    t_end: float,
    cfg: IntegratorConfig,
    log_step_s: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate f from t0 to t_end, sampling on a uniform log grid.

    The integrator is forced to land exactly on every log instant (steps are
    clipped at the interval boundary, no dense-output interpolation), so the
    returned samples are true integration states.  Returns ``(times,
    states)`` with states of shape (len(times), len(x0)).

    Raises IntegrationError (naming the failure time and state entry) on
    non-finite states and StepSizeUnderflowError if the adaptive controller
    cannot meet tolerance above min_step_s.
    """
    x = np.asarray(x0, dtype=float).copy()
    times = log_grid(t0, t_end, log_step_s)
    out = np.empty((len(times), x.size))
    out[0] = x
    if len(times) == 1:
        return times, out

    adaptive = cfg.method == "rk45_adaptive"
    h_adaptive = min(cfg.step_s, cfg.max_step_s)

    for i in range(1, len(times)):
        t_a, t_b = times[i - 1], times[i]
        if adaptive:
            x, h_adaptive = _advance_adaptive(f, x, t_a, t_b, h_adaptive, cfg)
        else:
            x = _advance_fixed(f, x, t_a, t_b, cfg.step_s)
        if not np.isfinite(x).all():
            _raise_non_finite(t_b, x)
        out[i] = x
    return times, out


def _advance_fixed(f, x, t_a, t_b, step_s):
    n_sub = max(1, int(np.ceil((t_b - t_a) / step_s - 1e-12)))
    for j in range(n_sub):
        t = t_a + j * step_s
        h = min(step_s, t_b - t)
        x = rk4_step(f, t, x, h)
    return x


def _advance_adaptive(f, x, t_a, t_b, h, cfg):
    t = t_a
    while t < t_b - 1e-15 * max(1.0, abs(t_b)):
        h_try = min(h, t_b - t)
        x_new, err, h_next = rk45_step(f, t, x, h_try, cfg)
        if err <= 1.0:
            t = t_b if h_try >= t_b - t else t + h_try
            x = x_new
            h = min(max(h_next, cfg.min_step_s), cfg.max_step_s)
        else:
            if h_next < cfg.min_step_s:
                raise StepSizeUnderflowError(t, h_next, cfg.min_step_s)
            h = h_next
    return x, h


def central_difference(series: np.ndarray, index: int, h: float) -> float:
    """First derivative estimate (s[i+1] - s[i-1]) / (2h); exact for quadratics."""
    if not 1 <= index <= len(series) - 2:
        raise IndexError(
            f"central_difference needs 1 <= index <= {len(series) - 2}, "
            f"got {index}"
        )
    return (series[index + 1] - series[index - 1]) / (2.0 * h)


def second_central_difference(series: np.ndarray, index: int, h: float) -> float:
    """Second derivative estimate (s[i+1] - 2 s[i] + s[i-1]) / h^2."""
    if not 1 <= index <= len(series) - 2:
        raise IndexError(
            f"second_central_difference needs 1 <= index <= "
            f"{len(series) - 2}, got {index}"
        )
    return (series[index + 1] - 2.0 * series[index] + series[index - 1]) / (h * h)
