"""Exact checks of distribution-free symmetrization inequalities for i.i.d. pairs."""

__version__ = "0.1.0"

from .covering import (
    BallDifference,
    CoveringCertificate,
    Interval,
    annulus_constant_1d,
    covering_constant,
    covering_number_interval,
    covering_number_linf_box,
    greedy_cover_1d,
    lattice_cover_upper_bound,
    volume_lower_bound,
)
from .extremal import (
    ExtremalParams,
    build_extremal,
    choose_params,
    convergence_table,
    predicted_index_counts,
    predicted_limit,
)
from .measure import DiscreteDistribution, NormBall, prob_diff_in, prob_sum_in, ratio
from .search import (
    claim1_witness,
    dinkelbach_maximize,
    monte_carlo_check,
    random_distribution,
    verify_theorem1,
    verify_theorem2,
)

__all__ = [
    "BallDifference",
    "CoveringCertificate",
    "DiscreteDistribution",
    "ExtremalParams",
    "Interval",
    "NormBall",
    "annulus_constant_1d",
    "build_extremal",
    "choose_params",
    "claim1_witness",
    "convergence_table",
    "covering_constant",
    "covering_number_interval",
    "covering_number_linf_box",
    "dinkelbach_maximize",
    "greedy_cover_1d",
    "lattice_cover_upper_bound",
    "monte_carlo_check",
    "predicted_index_counts",
    "predicted_limit",
    "prob_diff_in",
    "prob_sum_in",
    "random_distribution",
    "ratio",
    "verify_theorem1",
    "verify_theorem2",
    "volume_lower_bound",
]
