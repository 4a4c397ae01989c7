import math

import pytest

from bellspace.models import SingletSampler
from bellspace.probability_space import SettingDistribution, uniform_settings

OPTIMAL = (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)


@pytest.fixture
def uniform():
    return uniform_settings()


@pytest.fixture
def skewed():
    return SettingDistribution(((0.4, 0.1), (0.1, 0.4)))


@pytest.fixture
def optimal_singlet():
    return SingletSampler(*OPTIMAL)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
