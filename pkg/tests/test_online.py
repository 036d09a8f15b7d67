import numpy as np
import pytest

from tempreg.envs import NoisyWalk, walk_theta_star
from tempreg.errors import Divergence
from tempreg.mdp import TabularMdp, solve_exact
from tempreg.online import (
    LinearValueModel,
    OnlineConfig,
    evaluate_online,
    semi_gradient_td,
    smoothed_td,
    td0,
)
from tempreg.operators import RegularizerSpec, regularized_solve

from conftest import CYCLE, CYCLE_REV


def test_config_validation():
    with pytest.raises(ValueError):
        OnlineConfig(alpha=-0.1)
    with pytest.raises(ValueError):
        OnlineConfig(episodes=0)
    with pytest.raises(ValueError):
        OnlineConfig(alpha_tau=0.0)


def test_td0_one_state(one_state_mdp):
    cfg = OnlineConfig(alpha=0.1, steps_per_episode=2000, alpha_tau=None)
    assert td0(one_state_mdp, cfg).values[0] == pytest.approx(10.0, abs=0.1)


def test_td0_zero_step_size(two_state_mdp):
    run = td0(two_state_mdp, OnlineConfig(alpha=0.0, steps_per_episode=100))
    np.testing.assert_array_equal(run.values, [0.0, 0.0])


def test_td0_two_state_converges(two_state_mdp):
    cfg = OnlineConfig(alpha=1.0, steps_per_episode=200_000, seed=3, alpha_tau=1.0)
    v = td0(two_state_mdp, cfg).values
    np.testing.assert_allclose(v, solve_exact(two_state_mdp), atol=0.05)


def test_td0_rejects_regularized_spec(two_state_mdp):
    with pytest.raises(ValueError):
        td0(two_state_mdp, OnlineConfig(spec=RegularizerSpec.previous_state(0.5)))


def test_beta_zero_trace_identical_to_td0(cycle_mdp):
    for spec in (RegularizerSpec.previous_state(0.0), RegularizerSpec.exp_smoothing(0.0, 0.7)):
        cfg = OnlineConfig(alpha=0.5, spec=spec, steps_per_episode=3000, seed=11, alpha_tau=5.0)
        a = smoothed_td(cycle_mdp, cfg, reward_noise=[1.0, 0.0, 0.0], record="step")
        b = td0(cycle_mdp, OnlineConfig(alpha=0.5, steps_per_episode=3000, seed=11, alpha_tau=5.0),
                reward_noise=[1.0, 0.0, 0.0], record="step")
        assert np.array_equal(a.history, b.history)


@pytest.mark.parametrize("beta,lam", [(0.3, 0.0), (0.9, 0.5), (1.0, 0.9)])
def test_smoothed_one_state(one_state_mdp, beta, lam):
    cfg = OnlineConfig(alpha=0.1, spec=RegularizerSpec.exp_smoothing(beta, lam), steps_per_episode=3000, alpha_tau=None)
    assert smoothed_td(one_state_mdp, cfg).values[0] == pytest.approx(10.0, abs=0.1)


def test_smoothed_cycle_converges_to_regularized_fixed_point(cycle_mdp):
    spec = RegularizerSpec.exp_smoothing(0.3, 0.2)
    cfg = OnlineConfig(alpha=1.0, spec=spec, steps_per_episode=300_000, seed=1, alpha_tau=10.0)
    v = smoothed_td(cycle_mdp, cfg).values
    np.testing.assert_allclose(v, regularized_solve(cycle_mdp, CYCLE_REV, spec), atol=0.05)


def _hand_rolled(beta, lam, alpha, steps):
    # deterministic 2-cycle, r = (1, 0), gamma = 0.9; the printed update order
    g = 0.9
    r = [1.0, 0.0]
    v = [0.0, 0.0]
    s = 0
    p = v[s]
    trace = []
    for _ in range(steps):
        s2 = 1 - s
        v[s] = v[s] + alpha * (r[s] + g * ((1 - beta) * v[s2] + beta * p) - v[s])
        p = (1 - lam) * v[s] + lam * p
        trace.append(list(v))
        s = s2
    return np.array(trace)


def test_update_order_matches_hand_rolled_trace():
    mdp = TabularMdp([[0.0, 1.0], [1.0, 0.0]], [1.0, 0.0], 0.9)
    spec = RegularizerSpec.exp_smoothing(0.5, 0.5)
    cfg = OnlineConfig(alpha=0.5, spec=spec, steps_per_episode=6, alpha_tau=None)
    run = smoothed_td(mdp, cfg, record="step")
    np.testing.assert_allclose(run.history, _hand_rolled(0.5, 0.5, 0.5, 6), rtol=0, atol=1e-15)
    # first steps by hand: v0 = 0.5 and p = 0.25; then v1 = 0.5 * 0.9 * (0.5 * 0.5 + 0.5 * 0.25)
    np.testing.assert_allclose(run.history[0], [0.5, 0.0])
    np.testing.assert_allclose(run.history[1], [0.5, 0.16875])
    # updating p before v(s) would give a different second step
    assert not np.isclose(run.history[1, 1], 0.5 * 0.9 * (0.5 * 0.5 + 0.5 * 0.0))


def test_beta_decay_recovers_unregularized_values(cycle_mdp, two_state_mdp, one_state_mdp):
    spec = RegularizerSpec.previous_state(0.5, beta_decay=1e-4)
    cfg = OnlineConfig(alpha=1.0, spec=spec, steps_per_episode=300_000, seed=2, alpha_tau=10.0)
    v = smoothed_td(cycle_mdp, cfg).values
    exact = solve_exact(cycle_mdp)
    biased = regularized_solve(cycle_mdp, CYCLE_REV, RegularizerSpec.previous_state(0.5))
    assert np.abs(v - exact).max() <= 0.05
    assert np.abs(v - biased).max() > 0.1
    np.testing.assert_allclose(smoothed_td(two_state_mdp, cfg).values, solve_exact(two_state_mdp), atol=0.05)
    cfg1 = OnlineConfig(alpha=0.1, spec=spec, steps_per_episode=20_000, alpha_tau=None)
    assert smoothed_td(one_state_mdp, cfg1).values[0] == pytest.approx(10.0, abs=0.1)


def test_episodes_stop_at_terminal():
    # 0 -> 1 -> 2 (absorbing); every episode lasts two steps
    mdp = TabularMdp([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]], [1.0, 1.0, 5.0], 0.9)
    cfg = OnlineConfig(alpha=0.5, episodes=3, steps_per_episode=100, alpha_tau=None)
    run = td0(mdp, cfg, start=0, terminal=2, record="episode")
    assert run.steps == 6
    assert run.history.shape == (4, 3)
    np.testing.assert_array_equal(run.history[0], 0.0)
    assert np.all(run.history[:, 2] == 0.0)


def test_seed_determinism_and_noise(cycle_mdp):
    cfg = OnlineConfig(alpha=0.3, spec=RegularizerSpec.previous_state(0.5), steps_per_episode=500, seed=4)
    a = evaluate_online(cycle_mdp, cfg, reward_noise=[4.0, 0.0, 0.0])
    b = evaluate_online(cycle_mdp, cfg, reward_noise=[4.0, 0.0, 0.0])
    c = evaluate_online(cycle_mdp, cfg)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_evaluate_online_dispatch(cycle_mdp):
    cfg = OnlineConfig(alpha=0.3, steps_per_episode=200, seed=9)
    assert np.array_equal(evaluate_online(cycle_mdp, cfg).values, td0(cycle_mdp, cfg).values)


# -- linear model --------------------------------------------------------------


class ScriptedWalk:
    """Deterministic walk: positions advance along a fixed list."""

    gamma = 0.5

    def __init__(self, xs):
        self.xs = list(xs)

    def reset(self, rng, size):
        self.i = 0
        x = np.full(size, self.xs[0])
        return x, x.copy()

    def step(self, x, rng):
        self.i += 1
        x2 = np.full(x.shape, self.xs[self.i])
        return x2, x2.copy(), x2.copy()


def test_semi_gradient_hand_rolled():
    xs = [0.5, 1.0, 0.2, 0.8]
    spec = RegularizerSpec.previous_state(0.5)
    cfg = OnlineConfig(alpha=0.1, spec=spec, steps_per_episode=3)
    run = semi_gradient_td(ScriptedWalk(xs), cfg, reps=2, record=True)
    theta, trace, g = 0.0, 0.0, 0.5
    expected = []
    for t in range(3):
        s, s2 = xs[t], xs[t + 1]
        if t == 0:
            trace = theta * s
        target = s2 + g * (0.5 * theta * s2 + 0.5 * trace)
        theta += 0.1 * (target - theta * s) * s
        trace = theta * s
        expected.append(theta)
    np.testing.assert_allclose(run.history[:, 0], expected, atol=1e-15)
    np.testing.assert_array_equal(run.theta[0], run.theta[1])


def test_semi_gradient_zero_step_and_determinism():
    walk = NoisyWalk(sigma2=0.04)
    cfg = OnlineConfig(alpha=0.0, steps_per_episode=200, seed=5)
    np.testing.assert_array_equal(semi_gradient_td(walk, cfg, reps=3).theta, 0.0)
    cfg = OnlineConfig(alpha=0.01, spec=RegularizerSpec.exp_smoothing(0.5, 0.5), steps_per_episode=300, seed=5)
    a = semi_gradient_td(walk, cfg, reps=4, record=True)
    b = semi_gradient_td(walk, cfg, reps=4, record=True)
    assert np.array_equal(a.history, b.history)
    assert a.model(2) == LinearValueModel(float(a.theta[2]))
    assert LinearValueModel(2.0)(0.5) == 1.0


def test_semi_gradient_reaches_theta_star():
    walk = NoisyWalk()
    target = walk_theta_star(walk, episodes=500, seed=1)
    cfg = OnlineConfig(alpha=0.01, episodes=40, steps_per_episode=1000, seed=0)
    theta = semi_gradient_td(walk, cfg, reps=50).theta
    assert abs(theta.mean() - target) <= 0.5


def test_semi_gradient_divergence():
    walk = NoisyWalk(sigma2=0.25)
    cfg = OnlineConfig(alpha=50.0, steps_per_episode=1000, seed=0)
    with pytest.raises(Divergence):
        semi_gradient_td(walk, cfg, reps=2)
