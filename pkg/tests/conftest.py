"""Shared fixtures and script builders for the test suite."""

from __future__ import annotations

import pytest

from vinetouch.controller import ControllerConfig

BASELINE_KPA = 0.4
CONTACT_KPA = 1.02  # comfortably above the 1.01 kPa threshold


def constant_script(n_steps: int, left: float = BASELINE_KPA, right: float = BASELINE_KPA):
    return [(left, right)] * n_steps


def searching_demo_script(cfg: ControllerConfig, dt_s: float = 0.05):
    """Front-sensor script reproducing the recorded tabletop demo.

    Starting from a left sweep: both sweeps time out, the robot grows
    straight, sweeps again, finds contact on the right, grows toward it
    while contact persists, then the fresh front sensor finds nothing and
    the sweep times out back to growing straight.
    """
    steps_search = round(cfg.search_timeout_s / dt_s)
    steps_grow = round(cfg.grow_timeout_s / dt_s)
    contact_delay = round(5.0 / dt_s)

    script: list[tuple[float, float]] = []
    script += constant_script(steps_search)  # searching left, no contact
    script += constant_script(steps_search)  # searching right, no contact
    script += constant_script(steps_grow)  # growing straight
    script += constant_script(steps_search)  # searching left again, no contact
    script += constant_script(contact_delay)  # 5 s into the right sweep
    # contact on the right, sustained until the growth episode times out
    script += constant_script(steps_grow + 1, right=CONTACT_KPA)
    script += constant_script(steps_search)  # re-probe finds nothing
    script += constant_script(40)  # resumed growing straight
    return script


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] {name}: {outcome}")


@pytest.fixture
def controller_cfg() -> ControllerConfig:
    return ControllerConfig()
