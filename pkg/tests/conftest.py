"""Shared fixtures for the test suite.

Grids are deliberately small (8 or 16 points per axis) except where a test
is explicitly about resolution; random data is always seeded so failures
reproduce.
"""

import numpy as np
import pytest

from moistpe.grid import Grid
from moistpe.params import PhysParams


@pytest.fixture
def params():
    return PhysParams()


@pytest.fixture
def grid8(params):
    return Grid(8, 8, 8, params.p0, params.p1)


@pytest.fixture
def grid16(params):
    return Grid(16, 16, 16, params.p0, params.p1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
