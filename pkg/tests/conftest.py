"""Shared pytest plumbing.

The acceptance tests append one verdict line per criterion here; the hook
prints them as a summary block at the end of the run so the pass/fail
status of every criterion is visible even when output capture is on.
"""

CRITERION_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
