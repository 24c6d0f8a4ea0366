import numpy as np
import pytest

from markovsw.measure import EmpiricalMeasure


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_cloud(rng, n, d, shift=0.0, scale=1.0):
    return EmpiricalMeasure(scale * rng.standard_normal((n, d)) + shift)


def random_weighted(rng, n, d):
    w = rng.random(n) + 0.1
    return EmpiricalMeasure(rng.standard_normal((n, d)), w / w.sum())
