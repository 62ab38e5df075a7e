import numpy as np
import pytest

from leontief.games import BimatrixGame, game
from leontief.market import economy


@pytest.fixture
def swap_econ():
    """Two traders, each owning one good and wanting only the other's."""
    return economy(np.eye(2), [[0, 1], [1, 0]])


@pytest.fixture
def swap_econ_exact():
    return economy(np.eye(2, dtype=int), [[0, 1], [1, 0]], exact=True)


@pytest.fixture
def coordination():
    return game([[2, 1], [1, 2]], [[2, 1], [1, 2]], (1, 2))


@pytest.fixture
def all_ones():
    return game(np.ones((2, 2)), np.ones((2, 2)), (1, 2))


def random_unit_game(rng, n, m=None):
    m = n if m is None else m
    return BimatrixGame(1 + rng.random((m, n)), 1 + rng.random((m, n)), (1.0, 2.0))
