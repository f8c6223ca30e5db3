import numpy as np
import pytest

from hermframe import HermiteContext


@pytest.fixture(scope="session")
def ctx16():
    return HermiteContext(16)


@pytest.fixture(scope="session")
def ctx64():
    return HermiteContext(64)


@pytest.fixture(scope="session")
def ctx256():
    return HermiteContext(256)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
