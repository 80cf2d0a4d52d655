import numpy as np
import pytest

from herdlab import PursuitParams
from herdlab.kernels import available_backends


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture
def spiral_params():
    return PursuitParams(k=1.0, k1=1.0, R=2.0, omega=2.0, kappa=1.0)


@pytest.fixture
def circular_params():
    return PursuitParams.circular(k=1.0, R=2.0, omega=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
