import numpy as np
import pytest

from entrolab.suites import random_endomap, random_metric_space


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)


def make_space(rng, n):
    return random_metric_space(rng, n)


def make_system(rng, n):
    space = random_metric_space(rng, n)
    return space, random_endomap(rng, space)
