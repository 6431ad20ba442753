import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def grid_field(n, func):
    v1, v2 = np.divmod(np.arange(n * n), n)
    return func(v1.astype(float), v2.astype(float))
