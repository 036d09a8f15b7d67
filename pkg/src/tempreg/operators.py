"""Temporally regularized Bellman operators.

The regularized operator bootstraps partly on the value of the *previous*
state of the trajectory::

    T_beta v = r + gamma * ((1 - beta) P v + beta * B v)

where ``B`` is the backward operator. For previous-state regularization
``B = P_rev`` (the reversal chain); for exponential smoothing over all past
states ``B = (1 - lam) * sum_{i>=1} lam**(i-1) P_rev**i``, evaluated in
closed form as ``(1 - lam) P_rev (I - lam P_rev)^-1``. Either way the
operator is ``v -> r + gamma * M v`` for a single stochastic matrix ``M``
(see :func:`effective_matrix`), so it is a ``gamma``-contraction with a
unique fixed point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch
from .markov import mix
from .mdp import TabularMdp, bellman_apply, solve_linear, solve_with_matrix


class Regularizer(str, enum.Enum):
    NONE = "none"
    PREVIOUS_STATE = "previous-state"
    EXP_SMOOTHING = "exp-smoothing"


@dataclass(frozen=True)
class RegularizerSpec:
    """Regularizer kind and its parameters.

    ``lam`` only matters for exponential smoothing. ``beta_decay`` is the
    per-step decrement applied by the online algorithms; exact solvers ignore
    it.
    """

    kind: Regularizer = Regularizer.NONE
    beta: float = 0.0
    lam: float = 0.0
    beta_decay: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Regularizer(self.kind))
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must lie in [0, 1), got {self.lam}")
        if self.beta_decay < 0.0:
            raise ValueError("beta_decay must be nonnegative")

    @classmethod
    def none(cls) -> "RegularizerSpec":
        return cls()

    @classmethod
    def previous_state(cls, beta: float, beta_decay: float = 0.0) -> "RegularizerSpec":
        return cls(Regularizer.PREVIOUS_STATE, beta, 0.0, beta_decay)

    @classmethod
    def exp_smoothing(cls, beta: float, lam: float, beta_decay: float = 0.0) -> "RegularizerSpec":
        return cls(Regularizer.EXP_SMOOTHING, beta, lam, beta_decay)

    @property
    def effective_beta(self) -> float:
        return 0.0 if self.kind is Regularizer.NONE else self.beta

    @property
    def effective_lam(self) -> float:
        return self.lam if self.kind is Regularizer.EXP_SMOOTHING else 0.0

    def beta_at(self, step: int) -> float:
        """Regularization strength after ``step`` online updates."""
        return max(0.0, self.effective_beta - self.beta_decay * step)

    def as_params(self) -> dict[str, float | str]:
        return {
            "method": self.kind.value,
            "beta": self.effective_beta,
            "lambda": self.effective_lam,
            "beta_decay": self.beta_decay,
        }


def _check_rev(p: np.ndarray, p_rev) -> np.ndarray:
    p_rev = np.asarray(p_rev, dtype=float)
    if p_rev.shape != p.shape:
        raise DimensionMismatch(f"reversal of shape {p_rev.shape} for {p.shape} chain")
    return p_rev


def smoothing_operator(p_rev, lam: float) -> np.ndarray:
    """``(1 - lam) * sum_{i>=1} lam**(i-1) * p_rev**i`` in closed form."""
    p_rev = np.asarray(p_rev, dtype=float)
    if lam == 0.0:
        return p_rev.copy()
    n = p_rev.shape[0]
    # P_rev commutes with its resolvent, so (I - lam P_rev)^-1 P_rev is the same product
    return (1.0 - lam) * solve_linear(np.eye(n) - lam * p_rev, p_rev)


def backward_operator(p_rev, spec: RegularizerSpec) -> np.ndarray:
    if spec.kind is Regularizer.EXP_SMOOTHING:
        return smoothing_operator(p_rev, spec.lam)
    return np.asarray(p_rev, dtype=float)


def effective_matrix(p, p_rev, spec: RegularizerSpec) -> np.ndarray:
    """Stochastic ``M`` with ``T_beta v = r + gamma * M v``."""
    p = np.asarray(p, dtype=float)
    p_rev = _check_rev(p, p_rev)
    beta = spec.effective_beta
    if beta == 0.0:
        return mix(p, p_rev, 0.0)
    return mix(p, backward_operator(p_rev, spec), beta)


def regularized_apply(mdp: TabularMdp, p_rev, spec: RegularizerSpec, v) -> np.ndarray:
    """One application of the regularized operator."""
    p_rev = _check_rev(mdp.transition, p_rev)
    beta = spec.effective_beta
    if beta == 0.0:
        return bellman_apply(mdp, v)
    v = np.asarray(v, dtype=float)
    if v.shape != (mdp.n_states,):
        raise DimensionMismatch(f"value vector of shape {v.shape} for {mdp.n_states} states")
    if spec.kind is Regularizer.EXP_SMOOTHING and spec.lam > 0.0:
        n = mdp.n_states
        back = (1.0 - spec.lam) * (p_rev @ solve_linear(np.eye(n) - spec.lam * p_rev, v))
    else:
        back = p_rev @ v
    return mdp.reward + mdp.gamma * ((1.0 - beta) * (mdp.transition @ v) + beta * back)


def regularized_solve(mdp: TabularMdp, p_rev, spec: RegularizerSpec) -> np.ndarray:
    """Unique fixed point ``v_beta`` of the regularized operator."""
    return solve_with_matrix(mdp, effective_matrix(mdp.transition, p_rev, spec))


def _tail(gamma: float, r_max: float, truncation: int) -> float:
    return gamma**truncation * 2.0 * r_max / (1.0 - gamma)


def bias_bound(mdp: TabularMdp, p_rev, spec: RegularizerSpec, truncation: int | None = None) -> float:
    """Upper bound on ``||v - v_beta||_inf``.

    Sums ``gamma**i * ||(P**i - M**i) r||_inf`` for ``i < truncation`` and adds
    the geometric tail ``gamma**truncation * 2 ||r||_inf / (1 - gamma)``, so
    the result stays a certified bound. With ``truncation=None`` the smallest
    horizon whose tail (without the factor 2) is below 1e-10 is used.
    """
    g = mdp.gamma
    r = mdp.reward
    r_max = float(np.abs(r).max())
    if truncation is None:
        if r_max == 0.0 or g == 0.0:
            truncation = 1
        else:
            truncation = max(1, math.ceil(math.log(1e-10 * (1.0 - g) / r_max) / math.log(g)) + 1)
    elif g**truncation * r_max / (1.0 - g) >= 1e-10 and r_max > 0.0:
        raise ValueError(f"truncation {truncation} leaves a tail above 1e-10")
    m = effective_matrix(mdp.transition, p_rev, spec)
    pr = r.copy()
    mr = r.copy()
    total = 0.0
    weight = 1.0
    for _ in range(truncation):
        total += weight * float(np.abs(pr - mr).max())
        pr = mdp.transition @ pr
        mr = m @ mr
        weight *= g
    return total + _tail(g, r_max, truncation)


class AverageReward(NamedTuple):
    rho: float
    discounted: float


def average_reward(mu, reward, gamma: float) -> AverageReward:
    """Stationary per-step reward ``mu . r`` and its discounted sum ``rho / (1 - gamma)``."""
    mu = np.asarray(mu, dtype=float)
    reward = np.asarray(reward, dtype=float)
    if mu.shape != reward.shape:
        raise DimensionMismatch(f"distribution {mu.shape} vs reward {reward.shape}")
    rho = float(mu @ reward)
    return AverageReward(rho, rho / (1.0 - gamma))


def regularizer_weights(spec: RegularizerSpec, tol: float = 1e-16) -> np.ndarray:
    """Weights placed on ``v(s_{t+1})``, ``v(s_{t-1})``, ``v(s_{t-2})``, ...

    The first entry is the forward weight ``1 - beta``. Exponential smoothing
    has infinitely many backward terms; the series is cut once the remaining
    mass drops below ``tol``.
    """
    beta = spec.effective_beta
    if spec.kind is not Regularizer.EXP_SMOOTHING or spec.lam == 0.0:
        return np.array([1.0 - beta, beta])
    lam = spec.lam
    terms = [1.0 - beta]
    remaining = beta
    k = 0
    while remaining > tol:
        w = beta * (1.0 - lam) * lam**k
        terms.append(w)
        remaining = beta * lam ** (k + 1)
        k += 1
    return np.array(terms)


def episodic_effective_matrix(mdp: TabularMdp, start: int, terminal: int, spec: RegularizerSpec) -> np.ndarray:
    """Effective matrix for episodes that restart at ``start`` and end at ``terminal``.

    In an episodic task the stationary distribution sits on the terminal
    state, so the reversal is taken with respect to the expected visit counts
    ``d`` of one episode instead: ``B[s, s'] = d[s'] P[s', s] / d[s]``. The
    online algorithms seed their trace with ``v(start)`` at episode start, so
    the step before the first one is an absorbing copy of ``start``. The
    terminal row is left absorbing.
    """
    p = mdp.transition
    n = p.shape[0]
    live = np.array([s for s in range(n) if s != terminal])
    q = p[np.ix_(live, live)]
    k = len(live)
    e_start = np.zeros(k)
    e_start[int(np.flatnonzero(live == start)[0])] = 1.0
    visits = solve_linear((np.eye(k) - q).T, e_start)
    if visits.min() <= 0.0:
        raise ValueError("every non-terminal state must be reachable from start")
    # augmented backward chain over live states plus the pre-start origin
    kern = np.zeros((k + 1, k + 1))
    kern[:k, :k] = (visits[None, :] * q.T) / visits[:, None]
    kern[:k, k] = e_start / visits
    kern[k, k] = 1.0
    embed = np.zeros((k + 1, k))
    embed[:k] = np.eye(k)
    embed[k] = e_start
    lam = spec.effective_lam
    if lam == 0.0:
        back = kern @ embed
    else:
        back = (1.0 - lam) * solve_linear(np.eye(k + 1) - lam * kern, kern) @ embed
    beta = spec.effective_beta
    m = p.copy()
    rows = (1.0 - beta) * p[live]
    rows[:, live] += beta * back[:k]
    m[live] = rows
    m[terminal] = 0.0
    m[terminal, terminal] = 1.0
    return m
