import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` prints one PASS/FAIL line and records it."""

    def report(n, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
        print(line)
        _LINES.append(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
