from __future__ import annotations

import numpy as np
import pytest

from wfx.core import MeasureSpace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_space(rng, shape, zeros=False):
    mu = rng.uniform(0.2, 2.0, size=shape)
    if zeros:
        mu[rng.random(shape) < 0.25] = 0.0
        mu.flat[0] = 1.0
    return MeasureSpace(shape, 1.0 / shape[0], mu)


SMALL_SHAPES = [(8,), (16,), (4, 4), (4, 8)]
