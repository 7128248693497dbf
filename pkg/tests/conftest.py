"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

# criterion number -> (title, passed, detail), filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    def record(number, title, result):
        passed, detail = result
        ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed, detail
    return record


def format_line(number, title, passed, detail):
    return f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(format_line(n, *ACCEPTANCE[n]))
