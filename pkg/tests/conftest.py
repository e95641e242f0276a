import numpy as np
import pytest

from chondrosim import ModelParams, default_params


@pytest.fixture
def baseline() -> ModelParams:
    """The parameter set shared by the built-in scenarios (taxis off)."""
    return default_params()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(987654321)
