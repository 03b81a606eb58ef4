import pytest

from bragg_backflow.config import bundled_config
from bragg_backflow.scenario import load_scenario


@pytest.fixture(scope="session")
def li7():
    return load_scenario(bundled_config())


@pytest.fixture(scope="session")
def li7_profile(li7):
    return li7.field_profile()


# one verdict line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


@pytest.fixture
def verdict(request):
    """Record ``verdict(n, passed, detail)``; the line is printed at the end of the run."""

    def record(number, passed, detail):
        ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        print(ACCEPTANCE_LINES[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
