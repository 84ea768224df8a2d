# Truncation operators package
from spcart.truncation.operators import (
    apply_truncation,
    hard_threshold,
    soft_threshold,
    threshold,
    truncate,
    truncate_by_energy,
    truncate_by_sparsity,
    truncate_columns,
)

__all__ = [
    "apply_truncation",
    "hard_threshold",
    "soft_threshold",
    "threshold",
    "truncate",
    "truncate_by_energy",
    "truncate_by_sparsity",
    "truncate_columns",
]
