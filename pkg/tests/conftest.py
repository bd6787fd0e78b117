import numpy as np
import pytest

from f4nls.checks import Context
from f4nls.grid import make_grid
from f4nls.wave import profile

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ctx():
    return Context()


@pytest.fixture(scope="session")
def grid():
    return make_grid()


@pytest.fixture(scope="session")
def wave(grid):
    return profile(grid)


@pytest.fixture(scope="session")
def small_grid():
    # coarser spacing, same box; good enough where 1e-9 accuracy is not needed
    return make_grid(96.0, 512)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
