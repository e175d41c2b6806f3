"""Shared test plumbing: acceptance verdict collection.

The acceptance tests record one verdict per criterion; a terminal summary
hook replays them as one PASS/FAIL line each at the end of the run, so
the outcome of every criterion is visible even when pytest captures
stdout.
"""

import pytest

_verdicts = {}


@pytest.fixture
def verdict():
    """Record an acceptance criterion outcome, then assert it."""

    def record(criterion, ok, detail=""):
        _verdicts[criterion] = bool(ok)
        assert ok, f"criterion {criterion} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_verdicts):
        status = "PASS" if _verdicts[criterion] else "FAIL"
        terminalreporter.write_line(f"CRITERION {criterion} {status}")
