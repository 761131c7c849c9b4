import math

import numpy as np
import pytest

from coherence_qsl.densmat import qubit, qubit_from_theta

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def plus():
    return qubit_from_theta(math.pi / 2)


@pytest.fixture
def mixed():
    return qubit(0.5, 0.0)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
