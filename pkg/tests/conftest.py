"""Acceptance reporting: one PASS/FAIL line per criterion in the terminal summary."""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, {"title": title, "passed": True, "seconds": 0.0,
                                         "ran": False})
    if rep.when == "call":
        entry["ran"] = True
        entry["seconds"] += rep.duration
    if rep.failed:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        e = _RESULTS[number]
        status = "PASS" if e["passed"] and e["ran"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {e['title']} "
                                    f"({e['seconds']:.2f} s)")
