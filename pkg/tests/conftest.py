import numpy as np
import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when == "teardown":
        return
    label = marker.args[0]
    results = item.config._criteria.setdefault(label, {})
    if report.when == "setup" and not report.failed:
        return
    results[item.name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, config):
    criteria = getattr(config, "_criteria", {})
    if not criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(criteria, key=lambda s: int(s.split(".")[0])):
        for test, status in criteria[label].items():
            terminalreporter.write_line(f"{status}  criterion {label}  ({test})")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
