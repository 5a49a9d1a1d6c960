import math

import pytest

from hardy_postselect.hardy import HardyConfiguration, solve_hardy

SQRT_HALF = math.sqrt(0.5)
Q34 = math.sqrt(0.75)


@pytest.fixture
def optimum():
    return solve_hardy(HardyConfiguration.diagonal(1.0))


@pytest.fixture
def q34():
    """Diagonal solution with q^2 = 3/4 (u^2 = 1/3)."""
    return solve_hardy(HardyConfiguration.diagonal(Q34))


_criteria = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.append((props["criterion"], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_criteria, key=lambda c: int(c[0].split(".")[0])):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")
