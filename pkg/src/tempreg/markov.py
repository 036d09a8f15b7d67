"""Finite ergodic Markov chains: stationary distributions, reversal, mixing.

Transition matrices are plain ``(n, n)`` float arrays with ``m[i, j]`` the
probability of moving from ``i`` to ``j``. Functions never modify their
inputs; returned matrices are marked read-only.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonConvergence, ZeroMass

ROW_SUM_TOL = 1e-12
MIN_MASS = 1e-15


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_stochastic(m, tol: float = ROW_SUM_TOL) -> np.ndarray:
    """Validate ``m`` as a square row-stochastic matrix and return a frozen copy.

    Raises ``ValueError`` if an entry leaves [0, 1] or a row sum is off by
    more than ``tol``.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or a.min() < 0.0 or a.max() > 1.0:
        raise ValueError("transition entries must lie in [0, 1]")
    err = np.abs(a.sum(axis=1) - 1.0).max()
    if err > tol:
        raise ValueError(f"rows must sum to 1 (max deviation {err:.3e})")
    return _frozen(a)


def is_stochastic(m, tol: float = ROW_SUM_TOL) -> bool:
    try:
        as_stochastic(m, tol)
    except ValueError:
        return False
    return True


def _power_iteration(m: np.ndarray, tol: float, max_iters: int) -> np.ndarray:
    n = m.shape[0]
    mu = np.full(n, 1.0 / n)
    for _ in range(max_iters):
        nxt = mu @ m
        if np.abs(nxt - mu).sum() <= tol:
            return mu
        mu = nxt / nxt.sum()
    raise NonConvergence(
        f"power iteration residual {np.abs(mu @ m - mu).sum():.3e} > {tol:.1e} "
        f"after {max_iters} iterations"
    )


def _direct_solve(m: np.ndarray) -> np.ndarray:
    # (M^T - I) mu = 0 with one equation replaced by sum(mu) = 1
    n = m.shape[0]
    a = m.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    mu = np.linalg.lstsq(a, b, rcond=None)[0]
    return mu


def stationary_distribution(
    m,
    tol: float = 1e-12,
    max_iters: int = 100_000,
    *,
    require_positive: bool = False,
) -> np.ndarray:
    """Stationary distribution ``mu`` with ``mu @ m == mu``.

    Power iteration is tried first; if it does not reach an L1 residual of
    ``tol`` within ``max_iters`` steps, a direct linear solve is used. Raises
    :class:`NonConvergence` when neither route meets ``tol`` (non-ergodic or
    extremely slowly mixing input).

    With ``require_positive`` set, a :class:`ZeroMass` error is raised if
    any probability falls below 1e-15, which would make the reversal chain
    undefined.
    """
    m = np.asarray(m, dtype=float)
    try:
        mu = _power_iteration(m, tol, max_iters)
    except NonConvergence:
        mu = _direct_solve(m)
        if np.any(mu < -tol):
            raise NonConvergence("direct solve produced negative probabilities (chain not ergodic?)")
        mu = np.clip(mu, 0.0, None)
        mu /= mu.sum()
        res = np.abs(mu @ m - mu).sum()
        if not np.isfinite(res) or res > tol:
            raise NonConvergence(f"direct solve residual {res:.3e} > {tol:.1e}")
    if require_positive and mu.min() < MIN_MASS:
        raise ZeroMass(f"stationary probability {mu.min():.3e} below {MIN_MASS:g}")
    return _frozen(mu)


def _check_mu(m: np.ndarray, mu: np.ndarray) -> None:
    if mu.shape != (m.shape[0],):
        raise DimensionMismatch(f"distribution of length {mu.shape} for {m.shape} matrix")


def reversal(m, mu) -> np.ndarray:
    """Time-reversed chain: ``rev[i, j] = mu[j] * m[j, i] / mu[i]``.

    Rows are renormalised to absorb the (tiny) residual of ``mu``.
    """
    m = np.asarray(m, dtype=float)
    mu = np.asarray(mu, dtype=float)
    _check_mu(m, mu)
    if mu.min() <= MIN_MASS:
        raise ZeroMass(f"stationary probability {mu.min():.3e} <= {MIN_MASS:g}")
    rev = mu[None, :] * m.T / mu[:, None]
    rev /= rev.sum(axis=1, keepdims=True)
    return _frozen(rev)


def is_reversible(m, mu, tol: float = 1e-12) -> bool:
    """Detailed balance check ``|mu_i m_ij - mu_j m_ji| <= tol`` for all pairs."""
    m = np.asarray(m, dtype=float)
    mu = np.asarray(mu, dtype=float)
    _check_mu(m, mu)
    flow = mu[:, None] * m
    return bool(np.abs(flow - flow.T).max() <= tol)


def mix(p, p_rev, beta: float) -> np.ndarray:
    """Convex combination ``(1 - beta) * p + beta * p_rev``."""
    p = np.asarray(p, dtype=float)
    p_rev = np.asarray(p_rev, dtype=float)
    if p.shape != p_rev.shape:
        raise DimensionMismatch(f"cannot mix {p.shape} with {p_rev.shape}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if beta == 0.0:
        out = p.copy()
    elif beta == 1.0:
        out = p_rev.copy()
    else:
        out = (1.0 - beta) * p + beta * p_rev
    return _frozen(out)


def limit_matrix(mu) -> np.ndarray:
    """``P^inf``: every row equals ``mu``."""
    mu = np.asarray(mu, dtype=float)
    return _frozen(np.tile(mu, (mu.size, 1)))


def mixing_error_curve(m, mu, iters: int, metric: str = "max") -> list[float]:
    """Distance of ``m**k`` to ``P^inf`` for ``k = 1..iters``.

    ``metric`` is ``"max"`` (largest absolute entry difference) or ``"fro"``
    (Frobenius norm).
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    m = np.asarray(m, dtype=float)
    mu = np.asarray(mu, dtype=float)
    _check_mu(m, mu)
    if metric == "max":
        dist = lambda d: float(np.abs(d).max())  # noqa: E731
    elif metric == "fro":
        dist = lambda d: float(np.linalg.norm(d))  # noqa: E731
    else:
        raise ValueError(f"unknown metric {metric!r}")
    inf = limit_matrix(mu)
    power = np.eye(m.shape[0])
    curve = []
    for _ in range(iters):
        power = power @ m
        curve.append(dist(power - inf))
    return curve
