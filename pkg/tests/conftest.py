"""Shared test plumbing.

The acceptance tests append one human-readable verdict line each to
``ACCEPTANCE_LINES``; the summary hook replays them at the end of the
run so the pass/fail ledger is visible even when every test passed
(pytest normally swallows stdout of passing tests).
"""

from __future__ import annotations

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
