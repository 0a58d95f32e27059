import numpy as np
import pytest

from schurdil import TracialAlgebra


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def m2_algebra():
    return TracialAlgebra.uniform((2,))


@pytest.fixture
def mixed_algebra():
    # M_2 + C with equal block mass
    return TracialAlgebra.uniform((2, 1))
