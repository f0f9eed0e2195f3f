import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from oseenlab.spectral import Grid2, TensorForcing, band_limited_noise  # noqa: E402

settings.register_profile("lab", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


@pytest.fixture
def grid_small():
    return Grid2(8.0, 64, 2 * math.pi, 32)


@pytest.fixture
def grid_mid():
    return Grid2(16.0, 256, 4 * math.pi, 128)


def band_tensor(grid, seed, lo=2.0, hi=8.0, width=1.0):
    rng = np.random.default_rng(seed)
    return TensorForcing(*(band_limited_noise(grid, lo, hi, rng, width) for _ in range(4)))
