"""
Shared pytest fixtures for jetnormals
"""

import numpy as np
import pytest

from tests.fixtures.sample_data import plane_cloud, sphere_cloud, tiny_params


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def plane():
    return plane_cloud()


@pytest.fixture(scope="session")
def sphere():
    return sphere_cloud()


@pytest.fixture
def random_params():
    return tiny_params(seed=7)
