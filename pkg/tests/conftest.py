import numpy as np
import pytest

from tempreg.mdp import TabularMdp

TWO_STATE = np.array([[0.9, 0.1], [0.2, 0.8]])
CYCLE = np.array([[0.1, 0.9, 0.0], [0.0, 0.1, 0.9], [0.9, 0.0, 0.1]])
CYCLE_REV = np.array([[0.1, 0.0, 0.9], [0.9, 0.1, 0.0], [0.0, 0.9, 0.1]])


def random_chain(rng, n):
    p = rng.random((n, n))
    return p / p.sum(axis=1, keepdims=True)


@pytest.fixture
def two_state_mdp():
    return TabularMdp(TWO_STATE, [1.0, 0.0], 0.5)


@pytest.fixture
def cycle_mdp():
    return TabularMdp(CYCLE, [1.0, 0.0, 0.0], 0.9)


@pytest.fixture
def one_state_mdp():
    return TabularMdp([[1.0]], [1.0], 0.9)
