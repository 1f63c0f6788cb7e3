import math

import pytest

from eigenbounds import ball_spectrum, box_spectrum

# Lines collected by the acceptance tests, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def square():
    return box_spectrum([math.pi, math.pi], 1000)


@pytest.fixture(scope="session")
def disk():
    return ball_spectrum(2, 1.0, 200)
