import pytest

from nanopol.config import config_scan, load_config

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    ok = report.passed if report.when == "call" else False
    prev = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}")


def _scan(name):
    cfg = load_config(name)
    return cfg, config_scan(cfg)


@pytest.fixture(scope="session")
def fig1b_scan():
    return _scan("fig1b")


@pytest.fixture(scope="session")
def fig1d_scan():
    return _scan("fig1d")


@pytest.fixture(scope="session")
def fig2b_scan():
    return _scan("fig2b")


@pytest.fixture(scope="session")
def fig2d_scan():
    return _scan("fig2d")
