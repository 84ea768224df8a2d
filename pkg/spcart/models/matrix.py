"""Array-valued domain types: solver inputs and factorization results.

These are frozen dataclasses over read-only numpy arrays, so a value built
once can be shared between threads without copying.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from spcart.core.errors import InputError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class InputKind(str, Enum):
    DATA = "data"
    COVARIANCE = "covariance"


@dataclass(frozen=True, eq=False)
class MatrixInput:
    """A data matrix (n samples x p variables) or a p x p covariance matrix."""

    matrix: np.ndarray
    kind: InputKind

    @classmethod
    def from_data(cls, data: np.ndarray) -> "MatrixInput":
        a = np.asarray(data, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise InputError(f"data matrix must be 2-D and non-empty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("data matrix contains non-finite entries")
        return cls(_frozen(a), InputKind.DATA)

    @classmethod
    def from_covariance(cls, cov: np.ndarray, tol: float = 1e-8) -> "MatrixInput":
        c = np.asarray(cov, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
            raise InputError(f"covariance must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InputError("covariance contains non-finite entries")
        scale = max(1.0, float(np.max(np.abs(c))))
        asym = float(np.max(np.abs(c - c.T)))
        if asym > tol * scale:
            raise InputError(f"covariance is not symmetric (max |C - C^T| = {asym:.3e})")
        c = (c + c.T) / 2.0
        smallest = float(np.linalg.eigvalsh(c)[0])
        if smallest < -tol * scale:
            raise InputError(f"covariance is not positive semidefinite (eigenvalue {smallest:.3e})")
        return cls(_frozen(c), InputKind.COVARIANCE)

    @property
    def is_data(self) -> bool:
        return self.kind is InputKind.DATA

    @property
    def p(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def n(self) -> Optional[int]:
        return int(self.matrix.shape[0]) if self.is_data else None

    def gram(self) -> np.ndarray:
        """A^T A in data mode, C in covariance mode."""
        if self.is_data:
            return self.matrix.T @ self.matrix
        return np.array(self.matrix)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """A^T A x (without forming A^T A) or C x."""
        if self.is_data:
            return self.matrix.T @ (self.matrix @ x)
        return self.matrix @ x

    def total_variance(self) -> float:
        if self.is_data:
            return float(np.sum(self.matrix ** 2))
        return float(np.trace(self.matrix))


@dataclass(frozen=True, eq=False)
class ThinSvd:
    """M ~ U diag(s) V^T truncated to k terms."""

    left_factor: np.ndarray
    singular_values: np.ndarray
    right_factor: np.ndarray

    @property
    def k(self) -> int:
        return int(self.singular_values.shape[0])

    def reconstruct(self) -> np.ndarray:
        return (self.left_factor * self.singular_values) @ self.right_factor.T


@dataclass(frozen=True, eq=False)
class CenteredData:
    matrix: np.ndarray
    column_means: np.ndarray

    def as_input(self) -> MatrixInput:
        return MatrixInput(self.matrix, InputKind.DATA)


@dataclass(frozen=True, eq=False)
class PcaBasis:
    """Leading r loadings and their spectrum.

    `spectrum` holds singular values in data mode and eigenvalues in
    covariance mode; `explained_variance` is EV(V) either way.
    """

    loadings: np.ndarray
    spectrum: np.ndarray
    kind: InputKind

    @property
    def r(self) -> int:
        return int(self.loadings.shape[1])

    @property
    def explained_variance(self) -> float:
        if self.kind is InputKind.DATA:
            return float(np.sum(self.spectrum ** 2))
        return float(np.sum(self.spectrum))


@dataclass(frozen=True, eq=False)
class TruncationResult:
    """A truncated, renormalized vector plus its accounting.

    `is_zero` marks truncations that removed everything; `vector` is then
    all zeros and the deviation angle is pi/2.
    """

    vector: np.ndarray
    truncated_energy: float
    cardinality: int
    deviation_sin: float
    is_zero: bool = False

    @property
    def sparsity(self) -> float:
        return 1.0 - self.cardinality / self.vector.shape[0]
