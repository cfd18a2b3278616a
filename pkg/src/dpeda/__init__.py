"""Budget-metered differentially private exploratory data analysis.

The package answers a fixed exploratory query set (distributions, missing
values, outliers, pairwise correlation) over tabular data with calibrated
Laplace noise, debits every answer against a privacy-budget ledger, and ships
a Bayesian-network synthesizer so the interactive and synthetic-data routes
can be compared at matched budgets.
"""

from dpeda.errors import (
    BudgetExhausted,
    DegenerateColumn,
    DomainError,
    DpError,
    EmptyColumn,
    InsufficientData,
    KindError,
    MissingPrerequisite,
    NotFound,
    ParamError,
    ParseError,
    SchemaMismatch,
    TooLarge,
)

__all__ = [
    "BudgetExhausted",
    "DegenerateColumn",
    "DomainError",
    "DpError",
    "EmptyColumn",
    "InsufficientData",
    "KindError",
    "MissingPrerequisite",
    "NotFound",
    "ParamError",
    "ParseError",
    "SchemaMismatch",
    "TooLarge",
]

__version__ = "0.1.0"
