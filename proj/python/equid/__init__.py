"""Equidistribution of polynomially-defined additive functions."""

from ._equid import (
    BudgetExceeded,
    InvariantViolation,
    PrecisionLoss,
    PreconditionError,
    count_by_orthogonality,
    count_exact,
    distribution,
    expsum,
    factor,
    is_jointly_equidistributed,
    joint_counts,
    poly_eval_mod,
    run_cli,
    system_info,
    verify_weil,
)

__all__ = [
    "BudgetExceeded",
    "InvariantViolation",
    "PrecisionLoss",
    "PreconditionError",
    "count_by_orthogonality",
    "count_exact",
    "distribution",
    "expsum",
    "factor",
    "is_jointly_equidistributed",
    "joint_counts",
    "poly_eval_mod",
    "run_cli",
    "system_info",
    "verify_weil",
]
