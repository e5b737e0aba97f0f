from dataclasses import replace

import numpy as np
import pytest

from ddmr_adrc.metrics import (
    comparison_rows,
    format_comparison,
    isu,
    itae,
    opi,
    peak_abs,
    reduction_percent,
    report_from_log,
    total_variation,
)
from ddmr_adrc.plant import DisturbanceProfile, Pose
from ddmr_adrc.simulation import CSV_COLUMNS, Scenario, SimLog, run_closed_loop


def test_opi_identical_series_is_zero():
    s = np.linspace(0, 5, 100)
    assert opi(s, s) == 0.0


def test_opi_constant_offset():
    ref = np.linspace(0, 5, 100)
    assert abs(opi(ref, ref + 0.3) - 0.09) < 1e-15


def test_opi_quadratic_scaling():
    rng = np.random.default_rng(1)
    ref = rng.normal(size=50)
    act = rng.normal(size=50)
    base = opi(ref, act)
    assert abs(opi(3 * ref, 3 * act) - 9 * base) < 1e-12 * max(1, base)


def test_opi_pairwise_reordering_invariance():
    rng = np.random.default_rng(2)
    ref = rng.normal(size=64)
    act = rng.normal(size=64)
    order = rng.permutation(64)
    assert abs(opi(ref, act) - opi(ref[order], act[order])) < 1e-15


def test_opi_length_mismatch():
    with pytest.raises(ValueError):
        opi(np.zeros(3), np.zeros(4))


def test_itae_zero_error():
    t = np.arange(0, 1.001, 0.01)
    assert itae(t, np.ones_like(t), np.ones_like(t)) == 0.0


def test_itae_constant_error_closed_form():
    # integral of t*c over [0,T] is c*T^2/2; the left-rectangle sum is
    # within one increment c*T*dt of it
    c, T, dt = 2.0, 1.0, 0.01
    t = np.arange(0, T + dt / 2, dt)
    got = itae(t, np.full_like(t, c), np.zeros_like(t))
    assert abs(got - c * T**2 / 2) <= c * T * dt + 1e-12


def test_isu_constant_input():
    dt = 0.01
    t = np.arange(0, 2 + dt / 2, dt)
    got = isu(t, np.full_like(t, 3.0))
    assert abs(got - 9.0 * 2.0) < 1e-9


def test_isu_zero():
    t = np.arange(0, 1, 0.01)
    assert isu(t, np.zeros_like(t)) == 0.0


def test_total_variation():
    assert total_variation(np.full(10, 1.7)) == 0.0
    ramp = np.linspace(0, 1, 17)
    assert abs(total_variation(ramp) - 1.0) < 1e-12
    ramp2 = np.linspace(0, 1, 1001)
    assert abs(total_variation(ramp2) - 1.0) < 1e-12


def test_peak_abs():
    assert peak_abs(np.array([0.1, -2.5, 1.0])) == 2.5
    with pytest.raises(ValueError):
        peak_abs(np.array([]))


def test_indices_nonnegative_on_random_series():
    rng = np.random.default_rng(3)
    t = np.arange(0, 1, 0.01)
    for _ in range(20):
        a = rng.normal(size=len(t))
        b = rng.normal(size=len(t))
        assert opi(a, b) >= 0.0
        assert itae(t, a, b) >= 0.0
        assert isu(t, a) >= 0.0
        assert total_variation(a) >= 0.0


def test_rectangle_rule_refinement(default_rc):
    # halving the log step changes ITAE/ISU by < 1% on a smooth run
    cfg = default_rc.controller("iadrc")
    base = Scenario(
        duration_s=10.0,
        disturbance=DisturbanceProfile(0.0, 1.0, 2.0, "right"),
        initial_pose=Pose(0.0, 0.0, 0.0),
    )
    coarse = run_closed_loop(base, cfg)
    fine = run_closed_loop(replace(base, log_step_s=0.005), cfg)
    for field in ("itae_right", "isu_right"):
        a = getattr(report_from_log(coarse), field)
        b = getattr(report_from_log(fine), field)
        assert abs(a - b) / abs(b) < 0.01


def test_reduction_percent_conventions():
    assert reduction_percent(10.0, 2.0) == 80.0
    assert reduction_percent(5.0, 5.0) == 0.0
    assert reduction_percent(0.0, 0.0) == 0.0
    assert reduction_percent(10.0, 12.0) == pytest.approx(-20.0)


def _tiny_log():
    n = 3
    series = {name: np.zeros(n) for name in CSV_COLUMNS}
    series["t"] = np.array([0.0, 0.1, 0.2])
    series["x_ref"] = np.array([0.0, 1.0, 2.0])
    series["x"] = np.array([0.0, 0.0, 0.0])
    series["wr_ref"] = np.ones(n)
    series["wr"] = np.zeros(n)
    series["ur"] = np.array([1.0, -1.0, 1.0])
    series["e_theta"] = np.array([0.0, -0.4, 0.1])
    return SimLog(series=series)


def test_report_from_log_fields():
    r = report_from_log(_tiny_log())
    assert abs(r.opi_x - (0 + 1 + 4) / 3) < 1e-15
    assert r.opi_y == 0.0
    assert abs(r.itae_right - (0.0 * 1 + 0.1 * 1) * 0.1) < 1e-15
    assert abs(r.isu_right - (1.0 + 1.0) * 0.1) < 1e-15
    assert r.tv_right == 4.0
    assert r.peak_e_theta == 0.4


def test_comparison_rows_and_format():
    a = report_from_log(_tiny_log())
    rows = comparison_rows(a, a)
    assert len(rows) == 10
    assert all(delta == 0.0 for _, _, _, delta in rows)
    text = format_comparison(a, a)
    assert "OPI_x" in text
    assert "delta_pct.opi_x=0.0" in text
