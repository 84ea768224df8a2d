# Evaluation criteria package
from spcart.metrics.criteria import (
    cpev,
    deviation_angle,
    explained_variance,
    nonorthogonality,
    snapshot,
    sparsity,
)

__all__ = ["cpev", "deviation_angle", "explained_variance", "nonorthogonality", "snapshot", "sparsity"]
