import functools

import pytest

from gdhierarchy.solver import TruncationSpec, solve_jets
from gdhierarchy.wave import solve_phi


@functools.lru_cache(maxsize=None)
def solved(r, N, D, G=1):
    return solve_jets(TruncationSpec(r, N, D, G=G))


@functools.lru_cache(maxsize=None)
def wave(r, N, D, G=1):
    return solve_phi(solved(r, N, D, G))


@pytest.fixture(scope="session")
def ws2():
    return wave(2, 7, 5, 2)


@pytest.fixture(scope="session")
def ws3():
    return wave(3, 8, 5, 2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
