import pytest

from genburgers.coeff import Coefficient
from genburgers.initial_data import Step
from genburgers.mild_solver import SolverConfig, certified_step, solve_global, solve_local

# exact value 1 / (8 A)^2 with A = 3 sqrt(3) / 16 + 1 / sqrt(pi), from a 40-digit mpmath evaluation
T_STAR_ALPHA1 = 0.01977271138275653081


@pytest.fixture(scope="session")
def alpha1():
    return Coefficient(1.0)


@pytest.fixture(scope="session")
def step_data():
    return Step(-1.0, 1.0)


@pytest.fixture(scope="session")
def desk_cfg():
    return SolverConfig()


@pytest.fixture(scope="session")
def coarse_cfg():
    return SolverConfig(nx=501, time_panels=48)


@pytest.fixture(scope="session")
def step_patch(alpha1, step_data, desk_cfg):
    return solve_local(step_data, 0.0, alpha1, desk_cfg)


@pytest.fixture(scope="session")
def step_global(alpha1, step_data, desk_cfg):
    """Step(-1, 1) over two certified steps."""
    return solve_global(step_data, 2 * certified_step(1.0, alpha1), alpha1, desk_cfg)


@pytest.fixture(scope="session")
def reversed_global(alpha1, desk_cfg):
    d = Step(1.0, -1.0)
    return solve_global(d, 2 * certified_step(1.0, alpha1), alpha1, desk_cfg)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
