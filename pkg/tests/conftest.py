from __future__ import annotations

import numpy as np
import pytest

from kdvlab.discretization.grid import Grid
from kdvlab.spectral.eigen import find_eigenvalues


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def lambda1():
    return find_eigenvalues(1.0, 1)[0].lam.real


@pytest.fixture
def grid64():
    return Grid(1.0, 64)
