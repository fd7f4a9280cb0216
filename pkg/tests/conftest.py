import pytest

_REPORT = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line, shown in the terminal summary."""

    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} {label}" + (f": {detail}" if detail else "")
        print(line)
        _REPORT.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_REPORT, key=lambda s: int(s.split()[2].rstrip(":"))
                           if s.split()[1] == "criterion" else 99):
            terminalreporter.write_line(line)
