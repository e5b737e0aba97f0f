import math

import numpy as np
import pytest

from ddmr_adrc.numerics import (
    IntegrationError,
    IntegratorConfig,
    StepSizeUnderflowError,
    central_difference,
    integrate_logged,
    log_grid,
    rk4_step,
    rk45_step,
    second_central_difference,
)

E_INV = 0.36787944117144233  # exp(-1)


def decay(t, x):
    return -x


def test_rk4_zero_field_leaves_state_unchanged():
    x = np.array([1.5, -2.0, 3.25])
    out = rk4_step(lambda t, s: np.zeros_like(s), 0.0, x, 0.1)
    assert np.array_equal(out, x)


def test_rk4_exact_for_constant_field():
    out = rk4_step(lambda t, s: np.array([1.0]), 0.0, np.array([0.0]), 0.5)
    assert out[0] == 0.5


def test_rk4_exponential_decay_ten_steps():
    x = np.array([1.0])
    for i in range(10):
        x = rk4_step(decay, i * 0.1, x, 0.1)
    assert abs(x[0] - E_INV) < 1e-5


def test_rk4_fourth_order_error_ratio():
    def run(h, n):
        x = np.array([1.0])
        for i in range(n):
            x = rk4_step(decay, i * h, x, h)
        return abs(x[0] - E_INV)

    ratio = run(0.1, 10) / run(0.05, 20)
    assert 12.0 <= ratio <= 20.0


def test_rk4_raises_on_non_finite_stage():
    def bad(t, x):
        return np.array([float("inf")])

    with pytest.raises(IntegrationError) as err:
        rk4_step(bad, 3.0, np.array([1.0]), 0.1)
    assert err.value.t == 3.0
    assert err.value.entry_index == 0


CFG45 = IntegratorConfig(method="rk45_adaptive", abs_tol=1e-8, rel_tol=1e-8)


def test_rk45_zero_field():
    x = np.array([2.0, -1.0])
    out, err, h_next = rk45_step(lambda t, s: np.zeros_like(s), 0.0, x, 0.1, CFG45)
    assert np.array_equal(out, x)
    assert err == 0.0
    assert h_next > 0.1  # controller grows the step


def test_rk45_fifth_order_error_ratio():
    def run(h, n):
        x = np.array([1.0])
        for i in range(n):
            x, _, _ = rk45_step(decay, i * h, x, h, CFG45)
        return abs(x[0] - E_INV)

    ratio = run(0.1, 10) / run(0.05, 20)
    assert 24.0 <= ratio <= 40.0


def test_rk45_adaptive_exponential_decay():
    _, states = integrate_logged(decay, np.array([1.0]), 0.0, 1.0, CFG45, 0.1)
    assert abs(states[-1, 0] - E_INV) < 1e-6


def test_rk45_adaptive_matches_analytic_on_every_log_point():
    times, states = integrate_logged(decay, np.array([1.0]), 0.0, 5.0, CFG45, 0.1)
    assert np.max(np.abs(states[:, 0] - np.exp(-times))) < 1e-6


def test_harmonic_oscillator_closed_orbit():
    def osc(t, x):
        return np.array([x[1], -x[0]])

    _, states = integrate_logged(
        osc, np.array([1.0, 0.0]), 0.0, 2.0 * math.pi, CFG45, math.pi / 50
    )
    assert np.max(np.abs(states[-1] - np.array([1.0, 0.0]))) < 1e-5


def test_step_size_underflow_error():
    cfg = IntegratorConfig(
        method="rk45_adaptive", step_s=0.05, abs_tol=1e-12, rel_tol=1e-12,
        min_step_s=1e-4,
    )

    def kink(t, x):
        return np.array([1e9 if t > 0.5 else 0.0])

    with pytest.raises(StepSizeUnderflowError):
        integrate_logged(kink, np.array([0.0]), 0.0, 1.0, cfg, 0.25)


def test_log_grid_sample_count():
    times, states = integrate_logged(
        decay, np.array([1.0]), 0.0, 100.0, IntegratorConfig(), 0.01
    )
    assert len(times) == 10001
    assert times[0] == 0.0
    assert times[-1] == 100.0
    assert states.shape == (10001, 1)


def test_zero_length_horizon():
    times, states = integrate_logged(
        decay, np.array([7.0]), 0.0, 0.0, IntegratorConfig(), 0.01
    )
    assert len(times) == 1
    assert states[0, 0] == 7.0


def test_non_multiple_horizon_includes_endpoint():
    times = log_grid(0.0, 0.25, 0.1)
    assert times[-1] == 0.25
    assert len(times) == 4  # 0.0, 0.1, 0.2, 0.25


def test_grid_uniform_and_strictly_increasing():
    times, _ = integrate_logged(
        decay, np.array([1.0]), 0.0, 3.0, IntegratorConfig(), 0.01
    )
    dt = np.diff(times)
    assert np.all(dt > 0)
    assert np.max(np.abs(dt - 0.01)) < 1e-12


def test_integration_determinism_bit_identical():
    runs = [
        integrate_logged(decay, np.array([1.0]), 0.0, 2.0, IntegratorConfig(), 0.05)[1]
        for _ in range(2)
    ]
    assert np.array_equal(runs[0], runs[1])

    runs45 = [
        integrate_logged(decay, np.array([1.0]), 0.0, 2.0, CFG45, 0.05)[1]
        for _ in range(2)
    ]
    assert np.array_equal(runs45[0], runs45[1])


def test_non_finite_state_names_entry_and_time():
    def blows(t, x):
        with np.errstate(over="ignore"):
            return np.array([x[1], x[0] * x[0] * 1e4])

    with pytest.raises(IntegrationError) as err:
        integrate_logged(
            blows, np.array([1.0, 1.0]), 0.0, 10.0, IntegratorConfig(step_s=0.1), 0.5
        )
    assert err.value.entry_index in (0, 1)
    assert "t=" in str(err.value)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"method": "euler"},
        {"step_s": 0.0},
        {"min_step_s": 0.0},
        {"min_step_s": 2.0, "max_step_s": 1.0},
        {"abs_tol": 0.0},
        {"rel_tol": -1.0},
    ],
)
def test_integrator_config_validation(kwargs):
    with pytest.raises(ValueError):
        IntegratorConfig(**kwargs)


def test_central_difference_exact_for_quadratic():
    h = 0.01
    t = np.arange(0, 2 + h / 2, h)
    s = t**2
    i = 100  # t = 1.0
    assert abs(central_difference(s, i, h) - 2.0) < 1e-9


def test_central_difference_constant_series_is_zero():
    s = np.full(11, 4.2)
    assert central_difference(s, 5, 0.1) == 0.0


def test_second_central_difference_cubic():
    h = 0.01
    t = np.arange(0, 2 + h / 2, h)
    s = t**3
    i = 100  # t = 1.0
    assert abs(second_central_difference(s, i, h) - 6.0) < 1e-3


def test_difference_index_bounds():
    s = np.arange(5.0)
    with pytest.raises(IndexError):
        central_difference(s, 0, 0.1)
    with pytest.raises(IndexError):
        central_difference(s, 4, 0.1)
    with pytest.raises(IndexError):
        second_central_difference(s, 4, 0.1)
