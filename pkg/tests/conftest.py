import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from logeuler.eos import EosSpec

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def log_eos():
    return EosSpec.logarithmic(1.0)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(1234)))
