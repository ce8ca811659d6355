import numpy as np
import pytest

from hybridsn_cli.model.tests.factories import tiny_config


@pytest.fixture
def tiny():
    return tiny_config()


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(99)))
