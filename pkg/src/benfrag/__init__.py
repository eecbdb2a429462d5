"""Fragmentation processes, significand statistics, and Mellin bounds."""

__version__ = "0.1.0"

from .benford import (
    SignificandStats,
    benford_cdf,
    chi_square_digits,
    digit_law,
    mantissa_discrepancy,
    mantissas,
    phi_s,
    proportion_curve,
    significand,
)
from .density import Density, from_config, power, table, triangular, uniform
from .fragmentation import (
    BoxPiece,
    FragConfig,
    PieceSet,
    closed_form_leaf,
    cut_sequence,
    fragment_full,
    fragment_sample,
    lower_dim_content,
    shared_factor_count,
)
from .harness import (
    ConvergenceRow,
    ExperimentPlan,
    dependency_profile,
    run_conjecture,
    run_expectation,
    run_variance,
)
from .mellin import (
    MellinPoint,
    MellinReport,
    condition_sum,
    dependence_bound,
    expectation_error_bound,
    mellin_at,
)
from .quadrature import QuadratureError, adaptive_simpson
from .rng import RngSpec

__all__ = [
    "BoxPiece",
    "ConvergenceRow",
    "Density",
    "ExperimentPlan",
    "FragConfig",
    "MellinPoint",
    "MellinReport",
    "PieceSet",
    "QuadratureError",
    "RngSpec",
    "SignificandStats",
    "adaptive_simpson",
    "benford_cdf",
    "chi_square_digits",
    "closed_form_leaf",
    "condition_sum",
    "cut_sequence",
    "dependence_bound",
    "dependency_profile",
    "digit_law",
    "expectation_error_bound",
    "fragment_full",
    "fragment_sample",
    "from_config",
    "lower_dim_content",
    "mantissa_discrepancy",
    "mantissas",
    "mellin_at",
    "phi_s",
    "power",
    "proportion_curve",
    "run_conjecture",
    "run_expectation",
    "run_variance",
    "shared_factor_count",
    "significand",
    "table",
    "triangular",
    "uniform",
]
