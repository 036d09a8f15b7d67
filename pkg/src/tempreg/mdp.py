"""Tabular MDPs under a fixed policy and the classical evaluation operator."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularSystem
from .markov import as_stochastic
from .rng import as_rng


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Policy-induced chain with state rewards ``r(s)`` and discount ``gamma``.

    ``transition`` is the matrix ``P^pi`` of the policy being evaluated; the
    reward of a step is the reward of the state it starts from.
    """

    transition: np.ndarray
    reward: np.ndarray
    gamma: float

    def __post_init__(self):
        p = as_stochastic(self.transition)
        r = np.array(self.reward, dtype=float)
        if r.shape != (p.shape[0],):
            raise DimensionMismatch(f"reward of shape {r.shape} for {p.shape[0]} states")
        if not np.all(np.isfinite(r)):
            raise ValueError("rewards must be finite")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        r.setflags(write=False)
        object.__setattr__(self, "transition", p)
        object.__setattr__(self, "reward", r)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    def with_reward(self, reward) -> "TabularMdp":
        return TabularMdp(self.transition, reward, self.gamma)


def _check_values(mdp: TabularMdp, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (mdp.n_states,):
        raise DimensionMismatch(f"value vector of shape {v.shape} for {mdp.n_states} states")
    return v


def solve_linear(matrix, rhs) -> np.ndarray:
    """Solve ``matrix @ x = rhs``, raising :class:`SingularSystem` on failure."""
    try:
        x = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("solution is not finite")
    return x


def bellman_apply(mdp: TabularMdp, v) -> np.ndarray:
    """One application of ``v -> r + gamma * P v``."""
    v = _check_values(mdp, v)
    return mdp.reward + mdp.gamma * (mdp.transition @ v)


def solve_with_matrix(mdp: TabularMdp, m) -> np.ndarray:
    """Fixed point of ``v -> r + gamma * m v`` for a stochastic ``m``."""
    m = np.asarray(m, dtype=float)
    if m.shape != mdp.transition.shape:
        raise DimensionMismatch(f"matrix of shape {m.shape} for {mdp.n_states} states")
    return solve_linear(np.eye(mdp.n_states) - mdp.gamma * m, mdp.reward)


def solve_exact(mdp: TabularMdp) -> np.ndarray:
    """Exact value ``v = (I - gamma P)^-1 r`` of the evaluated policy."""
    return solve_with_matrix(mdp, mdp.transition)


def sample_trajectory(mdp: TabularMdp, start: int, steps: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``steps`` transitions from ``start``.

    Returns ``(states, rewards)`` with ``steps + 1`` entries each;
    ``rewards[t] == mdp.reward[states[t]]``.
    """
    n = mdp.n_states
    if not 0 <= start < n:
        raise ValueError(f"start state {start} out of range for {n} states")
    rng = as_rng(seed)
    u = rng.random(steps)
    states = np.empty(steps + 1, dtype=np.int64)
    states[0] = start
    cum = np.cumsum(mdp.transition, axis=1)
    cum[:, -1] = 1.0
    cum_rows = cum.tolist()
    s = start
    for t in range(steps):
        s = bisect_right(cum_rows[s], u[t])
        states[t + 1] = s
    return states, mdp.reward[states]

