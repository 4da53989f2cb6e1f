"""Random-subspace derivative-free optimization: expected-decrease formulas,
Monte Carlo estimates and the optimizer driver."""

from ._core import (
    MAX_QUADRATURE_DEPTH,
    ConvergenceError,
    ObjectiveError,
    UnsupportedError,
    __version__,
    asymptotic_decrease,
    estimate,
    expected_decrease,
    figure_csv,
    figure_names,
    gamma_half_ratio,
    integral_I,
    log_gamma,
    optimize,
    paired_compare,
    parallel_per_work,
    per_evaluation,
    sample_stiefel,
    verify,
)

__all__ = [
    "MAX_QUADRATURE_DEPTH",
    "ConvergenceError",
    "ObjectiveError",
    "UnsupportedError",
    "__version__",
    "asymptotic_decrease",
    "estimate",
    "expected_decrease",
    "figure_csv",
    "figure_names",
    "gamma_half_ratio",
    "integral_I",
    "log_gamma",
    "optimize",
    "paired_compare",
    "parallel_per_work",
    "per_evaluation",
    "sample_stiefel",
    "verify",
]
