import time

import pytest

from ctlsim.circuit import reference_params
from ctlsim.matching import solve_cr_for_degeneracy

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item._ctl_elapsed = time.perf_counter() - start


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = getattr(report, "_ctl_criterion", None)
    if crit is None:
        return
    number, title = crit
    _criteria[number] = (title, report.outcome, getattr(report, "_ctl_elapsed", None))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report._ctl_criterion = tuple(mark.args)
        report._ctl_elapsed = getattr(item, "_ctl_elapsed", None)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcome, elapsed = _criteria[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        took = f" ({elapsed:.2f} s)" if elapsed is not None else ""
        terminalreporter.write_line(f"criterion {number}: {status} - {title}{took}")


@pytest.fixture(scope="session")
def ref():
    return reference_params()


@pytest.fixture(scope="session")
def solved50(ref):
    """Reference device with C_r tuned so that j = 50 is degenerate."""
    return ref.with_(c_right=solve_cr_for_degeneracy(50, ref))
