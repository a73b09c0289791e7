"""Collects acceptance verdict lines and replays them after the run,
outside pytest's output capture, so every criterion shows its PASS/FAIL
line even when the test passes."""

ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
