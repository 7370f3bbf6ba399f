import numpy as np
import pytest

from services.quadrature import QuadratureConfig


@pytest.fixture
def quad():
    return QuadratureConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / 'out'
    path.mkdir()
    return path
