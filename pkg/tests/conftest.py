import pytest

from ccfbessel.golden import DEFAULT_PATH, read_golden

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def golden():
    return read_golden(DEFAULT_PATH)


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary."""

    def _report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
