import itertools

import numpy as np
import pytest

from derangement.costs import CostMatrix, load_matrix
from derangement.permutation import Permutation

W4_TEXT = "4\n0 10 1 1\n10 0 1 1\n1 1 0 10\n1 1 10 0\n"
T3_TEXT = "3\n0 5 2\n5 0 4\n2 4 0\n"


@pytest.fixture
def w4():
    return load_matrix(W4_TEXT)


@pytest.fixture
def t3():
    return load_matrix(T3_TEXT)


def random_matrix(n, seed, low=-50, high=50):
    rng = np.random.default_rng(seed)
    a = np.triu(rng.integers(low, high + 1, size=(n, n)), 1)
    return CostMatrix(a + a.T)


def random_derangement(n, rng, two_factor=False):
    while True:
        images = rng.permutation(n) + 1
        p = Permutation(tuple(int(v) for v in images))
        if any(p(x) == x for x in range(1, n + 1)):
            continue
        if two_factor and any(p(p(x)) == x for x in range(1, n + 1)):
            continue
        return p


def all_derangements(n, two_factor=False):
    """Plain enumeration, independent of the package's permutation helpers."""
    for images in itertools.permutations(range(1, n + 1)):
        if any(images[x - 1] == x for x in range(1, n + 1)):
            continue
        if two_factor and any(images[images[x - 1] - 1] == x for x in range(1, n + 1)):
            continue
        yield images


def direct_cost(values, images):
    return sum(int(values[x][y - 1]) for x, y in enumerate(images))
