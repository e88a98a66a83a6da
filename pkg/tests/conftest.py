import pytest

_LINES = []


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)`` for the end-of-run summary."""
    def record(key, passed, detail):
        _LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
