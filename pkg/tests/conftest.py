import numpy as np
import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, title): acceptance criterion number and short title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    k, title = mark.args
    prev = _CRITERIA.get(k, (title, True))
    if rep.when == "call" or rep.failed:
        _CRITERIA[k] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        title, ok = _CRITERIA[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
