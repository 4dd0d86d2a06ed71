import numpy as np
import pytest

from rankset import RssDataset


@pytest.fixture
def two_strata():
    return RssDataset.from_strata([[1.0, 3.0], [5.0, 7.0]])


def random_strata(rng, counts, loc=0.0, scale=1.0):
    return [list(rng.normal(loc + h * 0.5, scale, size=n)) for h, n in enumerate(counts)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
