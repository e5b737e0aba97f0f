"""Tracking differentiators: smoothed reference r1 and derivative estimate r2.

Two variants:

* the tanh-based nonlinear TD
      r1' = r2
      r2' = -R^2 * tanh((beta*r1 - (1-alpha)*r) / gamma) - R*r2
  whose equilibrium under a constant input r0 sits at r1 = ((1-alpha)/beta)*r0
  (a DC gain below one for typical parameters; see ``normalize_output``), and

* the classical continuous time-optimal TD
      r1' = r2
      r2' = -R * sign(r1 - r + r2*|r2|/(2R))
  used as the baseline.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import IntegratorConfig, integrate_logged


class TdState(NamedTuple):
    r1: float  # tracking signal, input units
    r2: float  # derivative estimate, input units / s


@dataclass(frozen=True)
class IntdParams:
    """tanh-TD parameters; requires 0 < alpha < 1, beta > 1, gamma > 0, R > 0.

    The raw TD settles to r1 = ((1-alpha)/beta) * r for constant input, not
    to r itself.  With ``normalize_output`` the outputs (not the internal
    states) are rescaled by beta/(1-alpha) so the tracked signal has unity
    DC gain; the flag is off by default so the equations above are the
    reference behavior.
    """

    alpha: float
    beta: float
    gamma: float
    R: float
    normalize_output: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("0 < alpha < 1 required")
        if not self.beta > 1.0:
            raise ValueError("beta > 1 required")
        if not self.gamma > 0.0:
            raise ValueError("gamma > 0 required")
        if not self.R > 0.0:
            raise ValueError("R > 0 required")

    @property
    def output_gain(self) -> float:
        return self.beta / (1.0 - self.alpha) if self.normalize_output else 1.0


@dataclass(frozen=True)
class HanTdParams:
    """Classical TD speed factor R > 0 (time-optimal sign form)."""

    R: float

    def __post_init__(self):
        if not self.R > 0.0:
            raise ValueError("R > 0 required")


def intd_derivatives(s: TdState, r: float, p: IntdParams) -> TdState:
    """Time derivative of the tanh-TD state for input sample r."""
    r1, r2 = s
    r2_dot = (
        -p.R * p.R * math.tanh((p.beta * r1 - (1.0 - p.alpha) * r) / p.gamma)
        - p.R * r2
    )
    return TdState(r2, r2_dot)


def han_td_derivatives(s: TdState, r: float, p: HanTdParams) -> TdState:
    """Time derivative of the classical sign-form TD for input sample r."""
    r1, r2 = s
    a = r1 - r + r2 * abs(r2) / (2.0 * p.R)
    if a > 0.0:
        r2_dot = -p.R
    elif a < 0.0:
        r2_dot = p.R
    else:
        r2_dot = 0.0
    return TdState(r2, r2_dot)


def td_outputs(s: TdState, p) -> TdState:
    """Outputs fed downstream; applies the optional tanh-TD normalization."""
    if isinstance(p, IntdParams) and p.normalize_output:
        g = p.output_gain
        return TdState(s.r1 * g, s.r2 * g)
    return TdState(s.r1, s.r2)


def td_track(
    times: np.ndarray,
    samples: np.ndarray,
    p,
    cfg: IntegratorConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Run a TD over a sampled reference signal.

    ``times`` must be a uniform grid; the input is linearly interpolated
    between samples while the TD state integrates continuously.  Initial TD
    state is (0, 0).  Returns (r1, r2) series on the same grid, with the
    normalization flag applied for IntdParams.
    """
    times = np.asarray(times, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if times.shape != samples.shape:
        raise ValueError("times and samples must have equal length")
    if len(times) < 2:
        raise ValueError("need at least two samples")
    log_step = float(times[1] - times[0])

    if isinstance(p, IntdParams):
        deriv = intd_derivatives
    elif isinstance(p, HanTdParams):
        deriv = han_td_derivatives
    else:
        raise TypeError(f"unsupported TD parameter type {type(p).__name__}")

    t0 = float(times[0])
    t_end = float(times[-1])

    def f(t: float, x: np.ndarray) -> np.ndarray:
        r = float(np.interp(t, times, samples))
        d = deriv(TdState(x[0], x[1]), r, p)
        return np.array(d)

    grid, states = integrate_logged(
        f, np.zeros(2), t0, t_end, cfg, log_step
    )
    if len(grid) != len(times):
        raise RuntimeError("log grid mismatch against the input grid")

    r1 = states[:, 0]
    r2 = states[:, 1]
    if isinstance(p, IntdParams) and p.normalize_output:
        g = p.output_gain
        r1 = r1 * g
        r2 = r2 * g
    return r1, r2
