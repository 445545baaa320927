import random
from fractions import Fraction

import pytest

from gmra.torus import TorusSet


@pytest.fixture
def rng():
    return random.Random(20260809)


def random_torus_set(rng, max_intervals=4, max_den=64):
    pairs = []
    for _ in range(rng.randint(0, max_intervals)):
        d1, d2 = rng.randint(1, max_den), rng.randint(1, max_den)
        lo = Fraction(rng.randint(-d1, 2 * d1), d1)
        hi = lo + Fraction(rng.randint(1, d2), d2)
        pairs.append((lo, hi))
    return TorusSet.from_intervals(pairs)
