import numpy as np
import pytest

from ddmr_adrc.numerics import IntegratorConfig
from ddmr_adrc.tracking_differentiator import (
    HanTdParams,
    IntdParams,
    TdState,
    han_td_derivatives,
    intd_derivatives,
    td_track,
)

PAPER_INTD = dict(alpha=0.4968, beta=2.1555, gamma=11.9554, R=16.8199)
# equilibrium of the tanh TD under a unit step: (1 - alpha) / beta
STEP_EQ = 0.23344931570401298


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha": 0.0}, {"alpha": 1.0}, {"alpha": 1.5},
        {"beta": 1.0}, {"beta": 0.5},
        {"gamma": 0.0}, {"R": 0.0}, {"R": -1.0},
    ],
)
def test_intd_param_ranges(kwargs):
    bad = dict(PAPER_INTD)
    bad.update(kwargs)
    with pytest.raises(ValueError):
        IntdParams(**bad)


def test_han_param_range():
    with pytest.raises(ValueError):
        HanTdParams(R=0.0)


def test_intd_origin_is_equilibrium():
    p = IntdParams(**PAPER_INTD)
    d = intd_derivatives(TdState(0.0, 0.0), 0.0, p)
    assert d == (0.0, 0.0)


def test_intd_step_equilibrium_point():
    p = IntdParams(**PAPER_INTD)
    d = intd_derivatives(TdState(STEP_EQ, 0.0), 1.0, p)
    assert d.r1 == 0.0
    assert abs(d.r2) < 1e-12


def test_intd_derivative_formula():
    p = IntdParams(alpha=0.5, beta=2.0, gamma=1.0, R=3.0)
    d = intd_derivatives(TdState(1.0, 0.5), 0.0, p)
    assert d.r1 == 0.5
    assert abs(d.r2 - (-9.0 * np.tanh(2.0) - 1.5)) < 1e-15


def test_han_on_target_equilibrium():
    d = han_td_derivatives(TdState(2.0, 0.0), 2.0, HanTdParams(R=100.0))
    assert d == (0.0, 0.0)


def test_han_bang_value():
    d = han_td_derivatives(TdState(1.0, 0.0), 0.0, HanTdParams(R=100.0))
    assert d.r2 == -100.0


def test_han_sign_symmetry():
    p = HanTdParams(R=100.0)
    rng = np.random.default_rng(7)
    for _ in range(200):
        r1, r2 = rng.uniform(-3, 3, 2)
        d_pos = han_td_derivatives(TdState(r1, r2), 0.0, p)
        d_neg = han_td_derivatives(TdState(-r1, -r2), 0.0, p)
        assert d_neg.r2 == -d_pos.r2


def test_intd_acceleration_bound():
    # |r2'| <= R^2 + R |r2| follows from tanh saturation
    p = IntdParams(**PAPER_INTD)
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        r1, r2, r = rng.uniform(-10, 10, 3)
        d = intd_derivatives(TdState(r1, r2), r, p)
        assert abs(d.r2) <= p.R**2 + p.R * abs(r2) + 1e-12


def test_td_track_zero_input_stays_zero():
    t = np.arange(0, 2 + 0.005, 0.01)
    r1, r2 = td_track(t, np.zeros_like(t), IntdParams(**PAPER_INTD), IntegratorConfig())
    assert np.all(r1 == 0.0)
    assert np.all(r2 == 0.0)


def test_td_track_step_settles_at_equilibrium():
    t = np.arange(0, 6 + 0.005, 0.01)
    r1, _ = td_track(t, np.ones_like(t), IntdParams(**PAPER_INTD), IntegratorConfig())
    settled = r1[t >= 5.0]
    assert np.max(np.abs(settled - STEP_EQ)) < 0.01 * STEP_EQ


def test_td_track_normalized_step_settles_at_one():
    t = np.arange(0, 6 + 0.005, 0.01)
    p = IntdParams(normalize_output=True, **PAPER_INTD)
    r1, _ = td_track(t, np.ones_like(t), p, IntegratorConfig())
    assert abs(r1[-1] - 1.0) < 0.01


def test_han_tracks_sine_derivative():
    t = np.arange(0, 10 + 0.005, 0.01)
    r1, r2 = td_track(t, np.sin(t), HanTdParams(R=100.0), IntegratorConfig(step_s=1e-4))
    settled = t >= 2.0
    assert np.max(np.abs(r2[settled] - np.cos(t[settled]))) < 0.05


def test_r2_is_derivative_of_r1_on_smooth_trajectory():
    log_step = 0.01
    t = np.arange(0, 10 + log_step / 2, log_step)
    r1, r2 = td_track(t, np.sin(t), IntdParams(**PAPER_INTD), IntegratorConfig())
    fd = (r1[2:] - r1[:-2]) / (2 * log_step)
    tol = 10 * log_step**2 + 1e-6
    assert np.max(np.abs(fd - r2[1:-1])) < tol


def test_intd_attenuates_sampling_noise():
    # step + uniform noise of amplitude 0.1: the TD's derivative output has
    # far lower variance than differencing the raw samples
    log_step = 0.01
    t = np.arange(0, 10 + log_step / 2, log_step)
    rng = np.random.default_rng(42)
    noisy = 1.0 + rng.uniform(-0.1, 0.1, size=len(t))
    _, r2 = td_track(t, noisy, IntdParams(**PAPER_INTD), IntegratorConfig())
    settled = t >= 5.0
    fd_raw = (noisy[2:] - noisy[:-2]) / (2 * log_step)
    assert np.var(r2[settled]) < np.var(fd_raw[settled[1:-1]])


def test_td_track_rejects_bad_input():
    t = np.arange(0, 1, 0.01)
    with pytest.raises(ValueError):
        td_track(t, np.zeros(3), IntdParams(**PAPER_INTD), IntegratorConfig())
    with pytest.raises(TypeError):
        td_track(t, np.zeros_like(t), object(), IntegratorConfig())
