import numpy as np
import pytest

from tempreg.errors import DimensionMismatch, SingularSystem
from tempreg.markov import stationary_distribution
from tempreg.mdp import TabularMdp, bellman_apply, sample_trajectory, solve_exact, solve_linear

from conftest import TWO_STATE, random_chain


def test_bellman_one_state(one_state_mdp):
    np.testing.assert_allclose(bellman_apply(one_state_mdp, [0.0]), [1.0])
    np.testing.assert_allclose(bellman_apply(one_state_mdp, [10.0]), [10.0])


def test_bellman_two_applications(two_state_mdp):
    v = np.zeros(2)
    for _ in range(2):
        v = bellman_apply(two_state_mdp, v)
    np.testing.assert_allclose(v, [1.45, 0.1], atol=1e-15)
    # brute force: r + g P r
    r = np.array([1.0, 0.0])
    np.testing.assert_allclose(v, r + 0.5 * TWO_STATE @ r, atol=1e-15)


def test_bellman_dimension_mismatch(two_state_mdp):
    with pytest.raises(DimensionMismatch):
        bellman_apply(two_state_mdp, np.zeros(3))


def test_solve_exact_examples(one_state_mdp, two_state_mdp):
    np.testing.assert_allclose(solve_exact(one_state_mdp), [10.0], atol=1e-12)
    zero = two_state_mdp.with_reward([0.0, 0.0])
    np.testing.assert_array_equal(solve_exact(zero), [0.0, 0.0])
    v = solve_exact(two_state_mdp)
    # (I - P/2) v = r by hand: det 0.325, v = (0.6, 0.1) / 0.325
    np.testing.assert_allclose(v, [24 / 13, 4 / 13], atol=1e-12)
    # truncated Neumann series oracle
    series = np.zeros(2)
    term = np.array([1.0, 0.0])
    for _ in range(61):
        series += term
        term = 0.5 * TWO_STATE @ term
    np.testing.assert_allclose(v, series, atol=1e-12)


def test_solve_exact_is_fixed_point():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        mdp = TabularMdp(random_chain(rng, n), rng.normal(size=n), float(rng.uniform(0, 0.99)))
        v = solve_exact(mdp)
        assert np.abs(bellman_apply(mdp, v) - v).max() <= 1e-10


def test_solve_linear_singular():
    with pytest.raises(SingularSystem):
        solve_linear(np.zeros((2, 2)), np.ones(2))


def test_mdp_validation():
    with pytest.raises(ValueError):
        TabularMdp(TWO_STATE, [1.0, 0.0], 1.0)
    with pytest.raises(DimensionMismatch):
        TabularMdp(TWO_STATE, [1.0, 0.0, 0.0], 0.9)
    with pytest.raises(ValueError):
        TabularMdp([[0.5, 0.4], [0.5, 0.5]], [1.0, 0.0], 0.9)
    with pytest.raises(ValueError):
        TabularMdp(TWO_STATE, [np.nan, 0.0], 0.9)


def test_mdp_is_immutable(two_state_mdp):
    with pytest.raises(ValueError):
        two_state_mdp.reward[0] = 3.0
    with pytest.raises(ValueError):
        two_state_mdp.transition[0, 0] = 0.5


def test_trajectory_deterministic_chain(one_state_mdp):
    states, rewards = sample_trajectory(one_state_mdp, 0, 10, seed=1)
    assert states.shape == (11,)
    assert np.all(states == 0)
    np.testing.assert_array_equal(rewards, np.ones(11))


def test_trajectory_seed_determinism(two_state_mdp):
    a = sample_trajectory(two_state_mdp, 0, 500, seed=42)
    b = sample_trajectory(two_state_mdp, 0, 500, seed=42)
    c = sample_trajectory(two_state_mdp, 0, 500, seed=43)
    np.testing.assert_array_equal(a[0], b[0])
    assert not np.array_equal(a[0], c[0])


def test_trajectory_rewards_follow_states(two_state_mdp):
    states, rewards = sample_trajectory(two_state_mdp, 1, 200, seed=0)
    assert states[0] == 1
    np.testing.assert_array_equal(rewards, two_state_mdp.reward[states])


def test_trajectory_visit_frequencies(two_state_mdp):
    states, _ = sample_trajectory(two_state_mdp, 0, 100_000, seed=7)
    freq = np.bincount(states, minlength=2) / states.size
    np.testing.assert_allclose(freq, stationary_distribution(TWO_STATE), atol=0.01)
