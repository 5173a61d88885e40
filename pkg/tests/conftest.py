import re

import pytest
from hypothesis import HealthCheck, settings

from twistring.curve_core import Curve, Translation
from twistring.divisor_calc import Divisor
from twistring.thcr_engine import SheafData

settings.register_profile(
    "repo", deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def curve():
    # y^2 + y = x^3 - x
    return Curve(0, 0, 1, -1, 0)


@pytest.fixture(scope="session")
def G(curve):
    return curve.point(0, 0)


@pytest.fixture(scope="session")
def T(curve, G):
    return Translation(curve, G)


@pytest.fixture(scope="session")
def T2(curve, G):
    """Translation by 2G: odd multiples of G lie off the orbit of even ones."""
    return Translation(curve, 2 * G)


@pytest.fixture(scope="session")
def sheaf(curve, T):
    return SheafData(T, Divisor.point(curve.infinity, 3))


@pytest.fixture(scope="session")
def sheaf2(curve, T2):
    return SheafData(T2, Divisor.point(curve.infinity, 3))


# one pass/fail line per acceptance criterion in the terminal summary
_criteria = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[n] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        status = "PASS" if _criteria[n] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}")
