"""Tabular policy evaluation with temporal regularization."""

from .errors import (
    Divergence,
    DimensionMismatch,
    NonConvergence,
    SingularSystem,
    TempRegError,
    TrajectoryTooShort,
    ZeroMass,
)
from .markov import (
    as_stochastic,
    is_reversible,
    mix,
    mixing_error_curve,
    reversal,
    stationary_distribution,
)
from .mdp import TabularMdp, bellman_apply, sample_trajectory, solve_exact
from .operators import (
    Regularizer,
    RegularizerSpec,
    average_reward,
    bias_bound,
    effective_matrix,
    regularized_apply,
    regularized_solve,
)
from .online import OnlineConfig, semi_gradient_td, smoothed_td, td0

__version__ = "0.1.0"
