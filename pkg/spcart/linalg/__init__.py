# Linear-algebra primitives package
from spcart.linalg.core import (
    center_columns,
    orthonormal_span,
    pca_loadings,
    polar,
    random_orthogonal,
    thin_svd,
)

__all__ = [
    "center_columns",
    "orthonormal_span",
    "pca_loadings",
    "polar",
    "random_orthogonal",
    "thin_svd",
]
