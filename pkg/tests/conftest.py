import sys

import numpy as np
import pytest

from fracctl.plant import FractionalPlant


def pytest_terminal_summary(terminalreporter):
    # echo the acceptance verdicts after the run, outside output capture
    for name, module in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance":
            lines = getattr(module, "VERDICTS", ())
            if lines:
                terminalreporter.section("acceptance criteria")
                for line in lines:
                    terminalreporter.write_line(line)
            break


@pytest.fixture
def frac_plant():
    # three-term fractional plant used as the worked example throughout
    return FractionalPlant([1.0, 0.5, 0.8], [0.0, 0.9, 2.2])


@pytest.fixture
def int_plant():
    # integer-order least-squares approximation of the same plant
    return FractionalPlant([1.0, 0.2313, 0.7414], [0.0, 1.0, 2.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
