import math

import mpmath
import pytest

mpmath.mp.dps = 40


def mp_theta_p(R, rA):
    R, rA = mpmath.mpf(R), mpmath.mpf(rA)
    return float(mpmath.acos((R**2 + 1 - rA**2) / (2 * R)))


def mp_g(R, nu):
    R, nu = mpmath.mpf(R), mpmath.mpf(nu)
    return mpmath.sqrt(R**2 / nu**2 - 1) + mpmath.asin(nu / R)


def mp_theta_G(R, nu):
    return float(mp_g(R, nu) - mp_g(1, nu))


def mp_interval_bound(L0, nu, rA):
    L0, nu, rA = mpmath.mpf(L0), mpmath.mpf(nu), mpmath.mpf(rA)
    return float((L0 - 1) / nu + mpmath.acos(1 - rA**2 / 2))


@pytest.fixture
def mp():
    return mpmath


SQRT2 = math.sqrt(2.0)


_criteria = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    key = name.split("[")[0]
    _criteria.setdefault(key, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        status = "PASS" if all(_criteria[key]) else "FAIL"
        terminalreporter.write_line(f"{status}  {key.replace('test_', '', 1)}")
