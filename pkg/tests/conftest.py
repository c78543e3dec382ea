import numpy as np
import pytest

from models.simulate import ishigami


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ishigami_frame():
    return ishigami(3000, 1).to_frame()
