import warnings

import pytest

from forceomit.params import baseline_params
from forceomit.steady import UnstableBranchWarning, solve_steady_state
from forceomit.sweep import sideband_forces

# (criterion, passed, detail) rows filled in by test_acceptance
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def baseline():
    return baseline_params()


@pytest.fixture(scope="session")
def forces(baseline):
    """Red- and blue-sideband forces (f1, f2) of the baseline."""
    return sideband_forces(baseline)


@pytest.fixture(scope="session")
def f1(forces):
    return forces[0]


@pytest.fixture(scope="session")
def f2(forces):
    return forces[1]


def _state(params):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnstableBranchWarning)
        return solve_steady_state(params)


@pytest.fixture(scope="session")
def red_point(baseline, f1):
    p = baseline.replace(force=f1)
    return p, _state(p)


@pytest.fixture(scope="session")
def blue_point(baseline, f2):
    p = baseline.replace(force=f2)
    return p, _state(p)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
