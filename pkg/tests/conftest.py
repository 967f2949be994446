import numpy as np
import pytest

from gmbqc.fixtures import builtin
from gmbqc.obsset import compute_V


@pytest.fixture(scope="session")
def ghz():
    return builtin("ghz-or")


@pytest.fixture(scope="session")
def bell():
    return builtin("bell-identity")


@pytest.fixture(scope="session")
def square():
    return builtin("mermin-square")


@pytest.fixture(scope="session")
def star():
    return builtin("mermin-star")


@pytest.fixture(scope="session")
def dressed():
    return builtin("dressed-star")


@pytest.fixture(scope="session")
def qubit():
    return builtin("one-qubit")


@pytest.fixture(scope="session")
def ghz_V(ghz):
    return compute_V(ghz.obs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
