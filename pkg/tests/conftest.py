"""Shared pytest plumbing for the acceptance gate.

Acceptance tests register a one-line verdict per criterion through
``record_criterion``; the lines are printed together in the terminal
summary so a full run ends with an explicit pass/fail roster.
"""

_CRITERION_LINES = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    """Store the verdict line for one acceptance criterion."""
    verdict = "PASS" if passed else "FAIL"
    _CRITERION_LINES[number] = f"CRITERION {number}: {verdict} - {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERION_LINES):
        terminalreporter.write_line(_CRITERION_LINES[number])
