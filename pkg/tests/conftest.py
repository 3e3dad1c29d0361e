"""Collects acceptance-criterion outcomes and prints one line per criterion."""

from __future__ import annotations

_criteria: dict[str, tuple[int, str]] = {}
_outcomes: dict[int, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criteria[item.nodeid] = tuple(mark.args)


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    number, _ = _criteria[report.nodeid]
    if report.failed:
        _outcomes[number] = "FAIL"
    elif report.when == "call" and number not in _outcomes:
        _outcomes[number] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in sorted(set(_criteria.values())):
        status = _outcomes.get(number, "NOT RUN")
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
