"""Evaluation criteria for sparse loadings: SP, STD, NOR, EV, CPEV."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from spcart.core.errors import ArgumentError, DegeneracyError, InputError
from spcart.linalg.core import orthonormal_span
from spcart.models.matrix import MatrixInput
from spcart.models.report import MetricsSnapshot

ZERO_TOL = 1e-12


def cardinality(x: np.ndarray) -> int:
    return int(np.sum(np.abs(np.asarray(x)) > ZERO_TOL))


def sparsity(x: np.ndarray) -> float:
    """Share of (near-)zero entries, 1 - ||x||_0 / p."""
    x = np.asarray(x, dtype=float)
    if x.size < 1:
        raise ArgumentError("sparsity of an empty vector")
    return 1.0 - cardinality(x) / x.size


def _check_loadings(inp: MatrixInput, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] != inp.p:
        raise InputError(f"loadings of shape {x.shape} do not match p={inp.p}")
    return x


def explained_variance(inp: MatrixInput, x: np.ndarray) -> float:
    """EV(X) = tr(X^T A^T A X), or tr(X^T C X) for a covariance."""
    x = _check_loadings(inp, x)
    if inp.is_data:
        return float(np.sum((inp.matrix @ x) ** 2))
    return float(np.sum(x * (inp.matrix @ x)))


def cpev(inp: MatrixInput, x: np.ndarray) -> float:
    """Variance captured by span(X) over total variance."""
    x = _check_loadings(inp, x)
    basis = orthonormal_span(x)
    total = inp.total_variance()
    if total == 0.0:
        raise DegeneracyError("input has zero total variance")
    return explained_variance(inp, basis) / total


def nonorthogonality(x: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean |cos| between distinct loadings, plus the full |cos| matrix."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ArgumentError("nonorthogonality needs at least two loadings", flag="--r", domain=">= 2")
    norms = np.linalg.norm(x, axis=0)
    if np.any(norms == 0.0):
        raise DegeneracyError("nonorthogonality of a zero loading is undefined")
    unit = x / norms
    cos = np.abs(unit.T @ unit)
    np.fill_diagonal(cos, 0.0)
    r = x.shape[1]
    return float(cos.sum() / (r * (r - 1))), cos


def deviation_angle(x: np.ndarray, z: np.ndarray) -> float:
    """Angle in [0, pi/2] between x and z; pi/2 when x is zero."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    xn = float(np.linalg.norm(x))
    zn = float(np.linalg.norm(z))
    if xn == 0.0 or zn == 0.0:
        return float(np.pi / 2)
    xu, zu = x / xn, z / zn
    cos = min(1.0, abs(float(xu @ zu)))
    sin = float(np.linalg.norm(zu - (xu @ zu) * xu))
    return float(np.arctan2(sin, cos))


def snapshot(inp: MatrixInput, x: np.ndarray) -> MetricsSnapshot:
    """All criteria for a p x r loading matrix."""
    x = _check_loadings(inp, x)
    cards = [cardinality(x[:, i]) for i in range(x.shape[1])]
    sps = [1.0 - c / x.shape[0] for c in cards]
    r = len(sps)
    total = inp.total_variance()
    if total == 0.0:
        raise DegeneracyError("input has zero total variance")
    ev = explained_variance(inp, x)
    nor = nonorthogonality(x)[0] if r >= 2 else 0.0
    return MetricsSnapshot(
        sp_mean=float(np.mean(sps)),
        sp_std=float(np.std(sps, ddof=1)) if r >= 2 else 0.0,
        sp_worst=float(np.min(sps)),
        nor=nor,
        ev=ev,
        ev_ratio=ev / total,
        cpev=min(cpev(inp, x), 1.0),
        nz=int(sum(cards)),
        per_column_sparsity=sps,
        per_column_cardinality=cards,
    )
