"""Synthetic environments: random chains, a high-variance 3-state MDP, a
two-room gridworld and a noisy one-dimensional walk."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .errors import TrajectoryTooShort
from .markov import stationary_distribution
from .mdp import TabularMdp, sample_trajectory
from .rng import as_rng, make_rng

# stream ids under a run seed
_MDP_STREAM = 10
_SMOOTH_STREAM = 11


def random_mdp(n: int, seed: int, reward_mode: str = "uniform", gamma: float = 0.9) -> TabularMdp:
    """Chain whose rows are ``n`` Uniform(0, 1) draws normalised to sum 1.

    Rewards are i.i.d. Uniform(0, 1) (``reward_mode="uniform"``) or zero
    (``"none"``).
    """
    if n < 2:
        raise ValueError("random_mdp needs n >= 2")
    rng = make_rng(seed, _MDP_STREAM)
    p = rng.random((n, n))
    p /= p.sum(axis=1, keepdims=True)
    if reward_mode == "uniform":
        r = rng.random(n)
    elif reward_mode == "none":
        r = np.zeros(n)
    else:
        raise ValueError(f"unknown reward_mode {reward_mode!r}")
    return TabularMdp(p, r, gamma)


def smooth_rewards(mdp: TabularMdp, n_smooth: int, seed: int) -> TabularMdp:
    """Average the rewards of ``n_smooth`` states that follow each other in time.

    A trajectory is started from the stationary distribution; the first
    ``n_smooth`` distinct states in visit order ``s_1 .. s_N`` get
    ``r(s_k) <- (r(s_k) + r(s_{k+1})) / 2``, applied for ``k = 1 .. N-1`` in
    order.
    """
    n = mdp.n_states
    if not 0 <= n_smooth <= n:
        raise ValueError(f"n_smooth must lie in [0, {n}]")
    reward = np.array(mdp.reward)
    if n_smooth < 2:
        return mdp.with_reward(reward)
    rng = make_rng(seed, _SMOOTH_STREAM)
    mu = stationary_distribution(mdp.transition)
    start = int(rng.choice(n, p=mu))
    budget = 10 * n * n_smooth
    states, _ = sample_trajectory(mdp, start, budget, rng)
    order: list[int] = []
    seen: set[int] = set()
    for s in states.tolist():
        if s not in seen:
            seen.add(s)
            order.append(s)
            if len(order) == n_smooth:
                break
    else:
        raise TrajectoryTooShort(f"only {len(order)} of {n_smooth} states visited in {budget} steps")
    for a, b in zip(order, order[1:]):
        reward[a] = (reward[a] + reward[b]) / 2.0
    return mdp.with_reward(reward)


def three_state_variance_mdp(
    stay: float = 0.1,
    reward=(1.0, 1.0, 1.0),
    noise_var: float = 4.0,
    gamma: float = 0.9,
) -> tuple[TabularMdp, np.ndarray]:
    """Ring ``S1 -> S2 -> S3 -> S1`` where each state stays put with probability ``stay``.

    Mean rewards are deterministic; the observed reward of ``S1`` carries
    zero-mean Gaussian noise of variance ``noise_var``. Returns the
    mean-reward MDP and the per-state noise variances.
    """
    if not 0.0 <= stay < 1.0:
        raise ValueError("stay must lie in [0, 1)")
    go = 1.0 - stay
    p = np.array([[stay, go, 0.0], [0.0, stay, go], [go, 0.0, stay]])
    return TabularMdp(p, reward, gamma), np.array([noise_var, 0.0, 0.0])


# -- two-room gridworld -------------------------------------------------------

ACTIONS = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}


@dataclass(frozen=True)
class RoomWorld:
    """Two 3x3 rooms side by side; the middle row has the only doorway.

    States are numbered row-major over the 3x6 grid. Crossing the doorway
    succeeds with probability ``door_prob`` (else the agent stays); bumping
    into a wall leaves the state unchanged. Every non-terminal step pays
    ``reward``; the terminal state is absorbing and pays nothing.
    """

    rows: int = 3
    room_cols: int = 3
    door_row: int = 1
    door_prob: float = 0.5
    gamma: float = 0.9
    reward: float = 1.0

    @property
    def cols(self) -> int:
        return 2 * self.room_cols

    @property
    def n_states(self) -> int:
        return self.rows * self.cols

    @property
    def start(self) -> int:
        return self.index(0, 0)

    @property
    def terminal(self) -> int:
        return self.index(self.rows - 1, self.cols - 1)

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col

    def coords(self, s: int) -> tuple[int, int]:
        return divmod(s, self.cols)

    def moves(self, s: int) -> dict[str, list[tuple[int, float]]]:
        """Outcome distribution ``[(next_state, prob), ...]`` per action."""
        row, col = self.coords(s)
        out = {}
        for name, (dr, dc) in ACTIONS.items():
            r2, c2 = row + dr, col + dc
            if not (0 <= r2 < self.rows and 0 <= c2 < self.cols):
                out[name] = [(s, 1.0)]
                continue
            crosses = (col < self.room_cols) != (c2 < self.room_cols)
            if not crosses:
                out[name] = [(self.index(r2, c2), 1.0)]
            elif row == self.door_row:
                out[name] = [(self.index(r2, c2), self.door_prob), (s, 1.0 - self.door_prob)]
            else:
                out[name] = [(s, 1.0)]
        return out

    def transition_matrix(self) -> np.ndarray:
        """Chain induced by the uniform random policy; terminal absorbing."""
        n = self.n_states
        p = np.zeros((n, n))
        for s in range(n):
            if s == self.terminal:
                p[s, s] = 1.0
                continue
            for outcomes in self.moves(s).values():
                for s2, prob in outcomes:
                    p[s, s2] += prob / len(ACTIONS)
        return p

    def mdp(self) -> TabularMdp:
        r = np.full(self.n_states, self.reward)
        r[self.terminal] = 0.0
        return TabularMdp(self.transition_matrix(), r, self.gamma)

    def grid(self, values) -> np.ndarray:
        """Reshape a per-state vector to the ``rows x cols`` layout."""
        return np.asarray(values).reshape(self.rows, self.cols)


def room_world() -> tuple[RoomWorld, TabularMdp]:
    world = RoomWorld()
    return world, world.mdp()


def reachable(p, start: int) -> np.ndarray:
    """Boolean mask of states reachable from ``start`` along positive-probability edges."""
    p = np.asarray(p)
    seen = np.zeros(p.shape[0], dtype=bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        s = frontier.pop()
        for s2 in np.flatnonzero(p[s] > 0):
            if not seen[s2]:
                seen[s2] = True
                frontier.append(s2)
    return seen


def monte_carlo_returns(mdp: TabularMdp, start: int, episodes: int, seed, horizon: int | None = None) -> np.ndarray:
    """Discounted returns ``sum_t gamma**t r(s_t)`` of ``episodes`` rollouts from ``start``.

    Rollouts are cut at ``horizon`` (default: where ``gamma**t`` drops below
    1e-8). Vectorised over episodes.
    """
    rng = as_rng(seed)
    g = mdp.gamma
    if horizon is None:
        horizon = int(np.ceil(np.log(1e-8) / np.log(g))) if g > 0 else 1
    cum = np.cumsum(mdp.transition, axis=1)
    cum[:, -1] = 1.0
    s = np.full(episodes, start)
    ret = np.zeros(episodes)
    disc = 1.0
    for _ in range(horizon):
        ret += disc * mdp.reward[s]
        u = rng.random(episodes)
        s = (u[:, None] >= cum[s]).sum(axis=1)
        disc *= g
    return ret


# -- noisy walk ---------------------------------------------------------------


@dataclass(frozen=True)
class NoisyWalk:
    """Random walk on [0, 1] observed through Gaussian noise.

    ``x' = clip(x + a, 0, 1)`` with ``a ~ N(0, action_scale)``, where
    ``action_scale`` is a standard deviation unless ``action_scale_is_var``.
    The agent observes ``s = x + eps`` with ``eps ~ N(0, sigma2)`` and earns
    ``r = x'``. ``x`` may be a scalar or an array of independent walkers.
    """

    x: float | np.ndarray = 0.5
    sigma2: float = 0.0
    action_scale: float = 0.05
    action_scale_is_var: bool = False
    gamma: float = 0.95
    episode_length: int = 1000
    clip: bool = True

    @property
    def action_std(self) -> float:
        return float(np.sqrt(self.action_scale)) if self.action_scale_is_var else self.action_scale

    def observe(self, x, rng):
        if self.sigma2 == 0.0:
            return np.array(x, dtype=float, copy=True) if np.ndim(x) else float(x)
        return x + rng.normal(0.0, np.sqrt(self.sigma2), np.shape(x) or None)

    def move(self, x, rng):
        x2 = x + rng.normal(0.0, self.action_std, np.shape(x) or None)
        return np.clip(x2, 0.0, 1.0) if self.clip else x2

    def step(self, x, rng):
        """Advance positions ``x``; returns ``(x_next, observation, reward)``."""
        x2 = self.move(x, rng)
        return x2, self.observe(x2, rng), x2

    def reset(self, rng, size: int):
        """Uniform start positions and their observations."""
        x = rng.random(size)
        return x, self.observe(x, rng)


def noisy_walk_step(walk: NoisyWalk, rng) -> tuple[NoisyWalk, float, float]:
    """One move of ``walk``; returns ``(next_walk, observation, reward)``."""
    rng = as_rng(rng)
    x2, obs, r = walk.step(walk.x, rng)
    return replace(walk, x=x2), obs, r


def discounted_returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """``G_t = sum_k gamma**k rewards[t + k]`` along the last axis."""
    rev = rewards[..., ::-1]
    return lfilter([1.0], [1.0, -gamma], rev, axis=-1)[..., ::-1]


def walk_theta_star(walk: NoisyWalk, episodes: int = 2000, seed: int = 0, horizon: int | None = None) -> float:
    """Monte Carlo estimate of the best single-parameter fit ``v(x) ~ theta * x``.

    Positions are those visited by ``episodes`` training-style episodes
    (uniform start, ``walk.episode_length`` steps); the value at each is the
    discounted return of the continuing walk, rolled ``horizon`` extra steps
    past the episode end. ``theta`` is the least-squares slope through the
    origin on the true (noise-free) positions.
    """
    rng = make_rng(seed, 3)
    g = walk.gamma
    if horizon is None:
        horizon = int(np.ceil(np.log(1e-8) / np.log(g)))
    length = walk.episode_length + horizon
    x = np.empty((episodes, length + 1))
    x[:, 0] = rng.random(episodes)
    for t in range(length):
        x[:, t + 1] = walk.move(x[:, t], rng)
    rewards = x[:, 1:]
    returns = discounted_returns(rewards, g)[:, : walk.episode_length]
    pos = x[:, : walk.episode_length]
    return float((pos * returns).sum() / (pos * pos).sum())
