from helpers import VERDICT_LINES


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance verdicts after capture ends so they always show."""
    if VERDICT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in VERDICT_LINES:
            terminalreporter.write_line(line)
