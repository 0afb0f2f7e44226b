import numpy as np
import pytest
from hypothesis import strategies as st

from qdelete.checks import random_density
from qdelete.resources import TWO_PI, QubitBasis

angles = st.floats(min_value=0.0, max_value=TWO_PI, exclude_max=True, allow_nan=False)
bases = st.builds(QubitBasis, angles, st.just(0.0))
complex_bases = st.builds(QubitBasis, angles, angles)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def rand_rho(rng):
    def make(n, register=None):
        return random_density(rng, n, register)
    return make


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
