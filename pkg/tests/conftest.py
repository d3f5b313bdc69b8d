import numpy as np
import pytest

import ttbeam as tb


def random_tt(shape, rank, seed):
    """Seeded random train used across the suite."""
    return tb.tt_random(shape, rank, seed=seed)


def random_small_tt(rng, max_d=5, max_n=8, max_r=4, max_elems=100_000):
    """Random train small enough to densify, with randomized geometry."""
    d = int(rng.integers(2, max_d + 1))
    while True:
        shape = rng.integers(2, max_n + 1, size=d)
        if np.prod(shape) <= max_elems:
            break
    r = int(rng.integers(1, max_r + 1))
    return tb.tt_random(shape, r, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
