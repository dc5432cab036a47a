import os

import pytest
from hypothesis import settings

from pascalasym.mpnum import PrecisionContext

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def ctx30():
    return PrecisionContext(30)


@pytest.fixture
def ctx60():
    return PrecisionContext(60)


@pytest.fixture(scope="session")
def exact_cache(tmp_path_factory):
    """Cache directory holding characteristic polynomials for L = 1..16 and even L up to 64."""
    from pascalasym.exact_core import cache_store, char_poly

    path = tmp_path_factory.mktemp("charpoly")
    for L in sorted(set(range(1, 17)) | set(range(2, 65, 2))):
        cache_store(char_poly(L), path)
    return path


_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and not report.failed):
        return
    number, title = mark.args[0], mark.args[1]
    prev = _CRITERIA.get(number)
    ok = report.passed and (prev is None or prev[1])
    _CRITERIA[number] = (title, ok, report.duration if report.when == "call" else 0.0)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, secs = _CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f}s)")
