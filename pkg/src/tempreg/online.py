"""Sample-based policy evaluation.

* :func:`td0` -- classical tabular TD(0).
* :func:`smoothed_td` -- tabular TD whose bootstrap target mixes the next
  state's value with an exponentially smoothed trace ``p`` of the values
  visited so far in the episode (``lam = 0`` gives the previous state's value).
* :func:`semi_gradient_td` -- the same target with a one-parameter linear
  model ``v(s) = theta * s`` on the noisy walk, vectorised over independent
  repetitions.

Tabular step sizes follow ``alpha / (1 + visits(s) / alpha_tau)``;
``alpha_tau=None`` keeps ``alpha`` constant. Values start at zero.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import Divergence
from .mdp import TabularMdp
from .operators import Regularizer, RegularizerSpec
from .rng import make_rng

DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class OnlineConfig:
    alpha: float = 1.0
    spec: RegularizerSpec = field(default_factory=RegularizerSpec)
    episodes: int = 1
    steps_per_episode: int = 1000
    seed: int = 0
    alpha_tau: float | None = 1.0

    def __post_init__(self):
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")
        if self.episodes < 1 or self.steps_per_episode < 1:
            raise ValueError("episodes and steps_per_episode must be >= 1")
        if self.alpha_tau is not None and self.alpha_tau <= 0.0:
            raise ValueError("alpha_tau must be positive")


@dataclass
class TabularRun:
    """Final values plus optional snapshots.

    ``history`` holds the value vector after every step (``record="step"``)
    or after every episode, with the initial zeros first (``record="episode"``).
    """

    values: np.ndarray
    history: np.ndarray | None = None
    steps: int = 0


class _Episodes:
    """Pre-drawn randomness for one tabular run; shared by all tabular learners
    so that runs with the same seed see the same trajectory."""

    def __init__(self, mdp: TabularMdp, cfg: OnlineConfig, reward_noise):
        self.rng = make_rng(cfg.seed, 1)
        cum = np.cumsum(mdp.transition, axis=1)
        cum[:, -1] = 1.0
        self.cum = cum.tolist()
        self.reward = mdp.reward.tolist()
        self.noise = None if reward_noise is None else np.sqrt(np.asarray(reward_noise, dtype=float)).tolist()
        self.steps = cfg.steps_per_episode

    def draw(self):
        u = self.rng.random(self.steps).tolist()
        z = self.rng.standard_normal(self.steps).tolist() if self.noise is not None else None
        return u, z

    def reward_at(self, s: int, z, t: int) -> float:
        if self.noise is None:
            return self.reward[s]
        return self.reward[s] + self.noise[s] * z[t]


def _step_size(cfg: OnlineConfig, visits: int) -> float:
    if cfg.alpha_tau is None:
        return cfg.alpha
    return cfg.alpha / (1.0 + visits / cfg.alpha_tau)


def _finish(v, hist, record, steps):
    history = None if record is None else np.array(hist, dtype=float)
    return TabularRun(np.array(v, dtype=float), history, steps)


def td0(
    mdp: TabularMdp,
    cfg: OnlineConfig,
    *,
    start: int = 0,
    terminal: int | None = None,
    reward_noise=None,
    record: str | None = None,
) -> TabularRun:
    """Tabular TD(0): ``v(s) += a * (r(s) + gamma * v(s') - v(s))``.

    Episodes start at ``start`` and stop after ``cfg.steps_per_episode``
    steps or on reaching ``terminal``, whose value stays zero.
    ``reward_noise`` is an optional per-state variance of zero-mean Gaussian
    noise added to observed rewards.
    """
    if cfg.spec.effective_beta != 0.0:
        raise ValueError("td0 takes an unregularized spec; use smoothed_td")
    eps = _Episodes(mdp, cfg, reward_noise)
    g = mdp.gamma
    v = [0.0] * mdp.n_states
    visits = [0] * mdp.n_states
    hist = [list(v)] if record == "episode" else []
    total = 0
    for _ in range(cfg.episodes):
        u, z = eps.draw()
        s = start
        for t in range(eps.steps):
            s2 = bisect_right(eps.cum[s], u[t])
            a = _step_size(cfg, visits[s])
            visits[s] += 1
            r = eps.reward_at(s, z, t)
            v[s] += a * (r + g * v[s2] - v[s])
            total += 1
            if record == "step":
                hist.append(list(v))
            if s2 == terminal:
                break
            s = s2
        if record == "episode":
            hist.append(list(v))
    return _finish(v, hist, record, total)


def smoothed_td(
    mdp: TabularMdp,
    cfg: OnlineConfig,
    *,
    start: int = 0,
    terminal: int | None = None,
    reward_noise=None,
    record: str | None = None,
) -> TabularRun:
    """Policy evaluation with an exponentially smoothed backward target.

    Per episode ``p = v(s0)``; then for every step::

        v(s) += a * (r(s) + gamma * ((1 - beta) * v(s') + beta * p) - v(s))
        p = (1 - lam) * v(s) + lam * p      # with the freshly updated v(s)

    A previous-state spec runs with ``lam = 0``; ``beta`` decays by
    ``spec.beta_decay`` per step (floored at 0). The learned values approach
    the fixed point of :func:`~tempreg.operators.regularized_solve` for the
    same spec. Keyword arguments are as for :func:`td0`.
    """
    spec = cfg.spec
    lam = spec.effective_lam
    decay = spec.beta_decay
    beta0 = spec.effective_beta
    eps = _Episodes(mdp, cfg, reward_noise)
    g = mdp.gamma
    v = [0.0] * mdp.n_states
    visits = [0] * mdp.n_states
    hist = [list(v)] if record == "episode" else []
    total = 0
    beta = beta0
    for _ in range(cfg.episodes):
        u, z = eps.draw()
        s = start
        p = v[s]
        for t in range(eps.steps):
            s2 = bisect_right(eps.cum[s], u[t])
            a = _step_size(cfg, visits[s])
            visits[s] += 1
            if decay:
                beta = max(0.0, beta0 - decay * total)
            r = eps.reward_at(s, z, t)
            v[s] += a * (r + g * ((1.0 - beta) * v[s2] + beta * p) - v[s])
            p = (1.0 - lam) * v[s] + lam * p
            total += 1
            if record == "step":
                hist.append(list(v))
            if s2 == terminal:
                break
            s = s2
        if record == "episode":
            hist.append(list(v))
    return _finish(v, hist, record, total)


def evaluate_online(mdp: TabularMdp, cfg: OnlineConfig, **kwargs) -> TabularRun:
    """Dispatch on ``cfg.spec``: TD(0) when unregularized, else :func:`smoothed_td`."""
    if cfg.spec.kind is Regularizer.NONE:
        return td0(mdp, cfg, **kwargs)
    return smoothed_td(mdp, cfg, **kwargs)


@dataclass(frozen=True)
class LinearValueModel:
    """``v(s) = theta * s`` for a scalar state ``s``."""

    theta: float = 0.0

    def __call__(self, s):
        return self.theta * s

    def gradient(self, s):
        return s


@dataclass
class LinearRun:
    theta: np.ndarray
    history: np.ndarray | None = None

    def model(self, rep: int = 0) -> LinearValueModel:
        return LinearValueModel(float(self.theta[rep]))


def semi_gradient_td(walk, cfg: OnlineConfig, reps: int = 1, record: bool = False) -> LinearRun:
    """Regularized semi-gradient TD on a scalar-state walk, ``reps`` independent copies.

    Per step, with ``v(s) = theta * s`` and ``grad v(s) = s``::

        theta += a * (r + gamma * ((1 - beta) * v(s_next) + beta * trace) - v(s)) * s
        trace = (1 - lam) * v(s) + lam * trace     # v with the updated theta

    ``trace`` restarts at ``v(s0)`` each episode; a previous-state spec uses
    ``lam = 0`` so ``trace`` is the value of the previous observation. ``cfg.alpha``
    is used as a constant step size. ``walk`` supplies ``reset(rng, size)``
    and ``step(x, rng)`` (see :class:`tempreg.envs.NoisyWalk`).

    Raises :class:`Divergence` if any ``|theta|`` exceeds 1e6.
    """
    spec = cfg.spec
    beta0 = spec.effective_beta
    lam = spec.effective_lam
    decay = spec.beta_decay
    rng = make_rng(cfg.seed, 2)
    g = walk.gamma
    alpha = cfg.alpha
    theta = np.zeros(reps)
    hist = []
    total = 0
    for _ in range(cfg.episodes):
        x, s = walk.reset(rng, reps)
        trace = theta * s
        # overflow is reported as Divergence below
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(cfg.steps_per_episode):
                x, s_next, r = walk.step(x, rng)
                beta = max(0.0, beta0 - decay * total) if decay else beta0
                target = r + g * ((1.0 - beta) * theta * s_next + beta * trace)
                theta = theta + alpha * (target - theta * s) * s
                trace = (1.0 - lam) * theta * s + lam * trace
                s = s_next
                total += 1
                if record:
                    hist.append(theta.copy())
        if not np.all(np.abs(theta) <= DIVERGENCE_LIMIT):
            raise Divergence(f"|theta| exceeded {DIVERGENCE_LIMIT:g}; reduce the step size")
    return LinearRun(theta, np.array(hist) if record else None)
