"""Input preprocessing: per-sample DC removal and data from a covariance."""

from __future__ import annotations

import numpy as np
from loguru import logger
from scipy import linalg

from spcart.core.errors import DegeneracyError, InputError
from spcart.models.matrix import MatrixInput


def remove_dc(rows: np.ndarray) -> np.ndarray:
    """Subtract each row's own mean from that row."""
    a = np.asarray(rows, dtype=float)
    if a.ndim != 2:
        raise InputError(f"expected an n x p matrix, got shape {a.shape}")
    return a - a.mean(axis=1, keepdims=True)


def artificial_data_from_covariance(cov: np.ndarray, literal: bool = False) -> np.ndarray:
    """A p x p matrix A with A^T A = C and the same eigenvectors as C.

    Built as V diag(sqrt(eig)) V^T. `literal=True` uses the inverse square
    root instead; that matrix keeps the eigenvectors but reverses the
    spectrum, and exists only to audit that reading.
    """
    c = MatrixInput.from_covariance(cov).matrix
    w, v = linalg.eigh(c)
    w = np.clip(w, 0.0, None)
    if literal:
        logger.warning("building artificial data with the inverse square root of the spectrum; "
                       "A^T A will not equal C")
        if np.any(w <= 1e-12 * max(1.0, float(w.max()))):
            raise DegeneracyError("covariance is singular; inverse square root undefined")
        scale = 1.0 / np.sqrt(w)
    else:
        scale = np.sqrt(w)
    a = (v * scale) @ v.T
    return (a + a.T) / 2.0
