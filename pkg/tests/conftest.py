import pytest

_LINES = []


@pytest.fixture
def acceptance_line():
    """Record one summary line; printed after the run under 'acceptance criteria'."""
    def record(line):
        _LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
