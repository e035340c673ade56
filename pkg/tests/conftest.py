import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pm1(m, n, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    return 2.0 * rng.integers(0, 2, size=(m, n)) - 1.0


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def H4():
    from herdisc.instances import sylvester_hadamard

    return sylvester_hadamard(4)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
