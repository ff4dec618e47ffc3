import math

import pytest

from molauth.channel import ChannelParams
from molauth.detect import MeasurementModel
from molauth.montecarlo import DfMode, Scenario


def make_scenario(L=4, sigma2=1.0, ratio=1.1, df_mode=DfMode.L, eve_q=5e5):
    alice = ChannelParams.centered(1.0, 20.0, 5e5, L)
    eve = ChannelParams(1.0, 20.0 * ratio, eve_q, L, alice.tap_spacing, alice.first_tap_time)
    return Scenario(alice, eve, MeasurementModel.isotropic(sigma2, L), df_mode)


def binomial_se(p, n):
    return math.sqrt(p * (1 - p) / n)


@pytest.fixture
def scenario():
    return make_scenario()


# -- acceptance reporting ----------------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        _CRITERIA[number] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"[{status}] AC{number}: {title}")
