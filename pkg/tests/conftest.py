import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report(capsys):
    """Record one pass/fail line for an acceptance criterion."""

    def _report(number, name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
