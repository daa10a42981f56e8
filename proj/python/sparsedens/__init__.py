"""Dantzig and Lasso density estimation over dictionaries on [0, 1]."""

from ._core import (
    BudgetError,
    ConfigError,
    Density,
    Dictionary,
    SolverError,
    __version__,
    check_assumptions,
    dantzig_solve,
    empirical_stats,
    lasso_solve,
    replicate,
    soft_threshold,
)

__all__ = [
    "BudgetError",
    "ConfigError",
    "Density",
    "Dictionary",
    "SolverError",
    "__version__",
    "check_assumptions",
    "dantzig_solve",
    "empirical_stats",
    "lasso_solve",
    "replicate",
    "soft_threshold",
]
