"""Shared pytest wiring: prints the acceptance scorecard after the run.

Acceptance tests append their `[acceptance NN] ...: PASS/FAIL` lines to
their module-level SCORECARD list; capture (even file-descriptor level)
would swallow plain prints from passing tests, so the lines are replayed
in the terminal summary where they are always visible.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SCORECARD", None) if mod else None
    if lines:
        terminalreporter.section("acceptance scorecard")
        for line in lines:
            terminalreporter.write_line(line)
