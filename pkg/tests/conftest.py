from __future__ import annotations

import pytest

_OUTCOMES: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    key = marker.args[0]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        message = "" if report.passed else str(report.longrepr).strip().splitlines()[-1]
        _OUTCOMES[key] = ("PASS" if report.passed else "FAIL", message)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    from test_acceptance import ACCEPTANCE

    terminalreporter.section("acceptance")
    for key, title in ACCEPTANCE.items():
        if key not in _OUTCOMES:
            continue
        status, message = _OUTCOMES[key]
        terminalreporter.write_line(f"{status}  {key:<22} {title}")
        if message:
            terminalreporter.write_line(f"      {message}")
