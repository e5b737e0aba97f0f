"""Shared fixtures: the expensive benchmark-scenario runs are computed once
per session and reused by the simulation, metrics and acceptance tests."""

from dataclasses import replace

import pytest

from ddmr_adrc.config import load_run_config
from ddmr_adrc.simulation import run_closed_loop

_LOG_CACHE = {}


def benchmark_log(rc, variant, magnitude):
    """Closed-loop SimLog for the default scenario at a given disturbance
    magnitude, cached across the whole test session."""
    key = (variant, magnitude)
    if key not in _LOG_CACHE:
        scenario = rc.scenario()
        scenario = replace(
            scenario,
            disturbance=replace(scenario.disturbance, magnitude=magnitude),
        )
        _LOG_CACHE[key] = run_closed_loop(scenario, rc.controller(variant))
    return _LOG_CACHE[key]


@pytest.fixture(scope="session")
def default_rc():
    return load_run_config()


@pytest.fixture(scope="session")
def default_magnitude(default_rc):
    return default_rc.value("scenario", "disturbance_magnitude")


@pytest.fixture(scope="session")
def paper_logs(default_rc, default_magnitude):
    """ADRC and IADRC logs for the default benchmark scenario."""
    return {
        variant: benchmark_log(default_rc, variant, default_magnitude)
        for variant in ("adrc", "iadrc")
    }
