import time

import pytest

from logtol import SizeUnit, TolerancePoint

SURVEY = [(2, 2), (3, 3), (4, 4), (5, 5), (7, 6), (10, 7), (20, 8)]

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}
_SESSION_START = time.perf_counter()


@pytest.fixture
def survey_points():
    return [TolerancePoint(x, e) for x, e in SURVEY]


@pytest.fixture
def pages():
    return SizeUnit.pages()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    name = request.node.get_closest_marker("criterion").args[0]
    details: list[str] = []
    _ACCEPTANCE[name] = (False, "did not complete")
    yield details.append
    _ACCEPTANCE[name] = (True, "; ".join(details))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker and call.when == "call" and call.excinfo is not None:
        _ACCEPTANCE[marker.args[0]] = (False, call.excinfo.exconly().splitlines()[0][:160])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        ok, detail = _ACCEPTANCE[name]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    elapsed = time.perf_counter() - _SESSION_START
    tr.write_line(f"[{'PASS' if elapsed < 60 else 'FAIL'}] suite runtime {elapsed:.1f} s (limit 60 s)")
