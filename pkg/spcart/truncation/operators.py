"""Truncation operators T-l0, T-l1, T-sp and T-en.

Each public operator takes a unit vector z, zeroes some entries, and
renormalizes. A truncation that removes everything comes back flagged
(`is_zero`) instead of raising; callers choose the fallback.

Ties in magnitude (T-sp, T-en) zero the lower index first.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np
from loguru import logger
from pydantic import ValidationError

from spcart.core.errors import ArgumentError
from spcart.models.config import TruncationKind, TruncationSpec
from spcart.models.matrix import TruncationResult

UNIT_TOL = 1e-8
ENERGY_RTOL = 1e-12


def _soft(z: np.ndarray, t: float) -> np.ndarray:
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def _hard(z: np.ndarray, t: float) -> np.ndarray:
    out = np.array(z, dtype=float, copy=True)
    out[np.abs(out) <= t] = 0.0
    return out


def _by_sparsity(z: np.ndarray, count: int) -> np.ndarray:
    out = np.array(z, dtype=float, copy=True)
    if count > 0:
        order = np.argsort(np.abs(z), kind="stable")
        out[order[:count]] = 0.0
    return out


def _by_energy(z: np.ndarray, share: float) -> np.ndarray:
    out = np.array(z, dtype=float, copy=True)
    energy = float(z @ z)
    if energy == 0.0:
        return out
    order = np.argsort(np.abs(z), kind="stable")
    cumulative = np.cumsum(z[order] ** 2) / energy
    k = int(np.searchsorted(cumulative, share * (1.0 + ENERGY_RTOL), side="right"))
    out[order[:k]] = 0.0
    return out


def apply_truncation(z: np.ndarray, spec: TruncationSpec) -> np.ndarray:
    """T_lambda(z) without renormalization; z may have any length."""
    z = np.asarray(z, dtype=float)
    if spec.kind is TruncationKind.HARD:
        return _hard(z, spec.lam)
    if spec.kind is TruncationKind.SOFT:
        return _soft(z, spec.lam)
    if spec.kind is TruncationKind.SPARSITY:
        return _by_sparsity(z, spec.count)
    return _by_energy(z, spec.lam)


def threshold(z: np.ndarray, spec: TruncationSpec, adaptive: bool = True) -> np.ndarray:
    """Truncate z of arbitrary length, keeping its scale.

    Adaptive mode computes ||z|| * T_lambda(z / ||z||), i.e. the threshold
    scales with ||z||. Raw mode applies T_lambda(z) as is. The two coincide
    for T-sp and T-en.
    """
    z = np.asarray(z, dtype=float)
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        return np.zeros_like(z)
    if adaptive:
        return norm * apply_truncation(z / norm, spec)
    return apply_truncation(z, spec)


def sin_between(x: np.ndarray, z: np.ndarray) -> float:
    """sin of the angle in [0, pi/2] between nonzero x and z."""
    xu = x / np.linalg.norm(x)
    zu = z / np.linalg.norm(z)
    residual = zu - (xu @ zu) * xu
    return float(min(1.0, np.linalg.norm(residual)))


def _check_unit(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise ArgumentError(f"expected a non-empty vector, got shape {z.shape}")
    norm = float(np.linalg.norm(z))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ArgumentError(f"truncation input must be a unit vector, got norm {norm:.12g}")
    return z


def _spec(kind: TruncationKind, lam: float) -> TruncationSpec:
    try:
        return TruncationSpec(kind=kind, lam=lam)
    except ValidationError as exc:
        raise ArgumentError(exc.errors()[0]["msg"], flag="--lambda") from None


def truncate(z: np.ndarray, spec: TruncationSpec) -> TruncationResult:
    """Truncate a unit vector and renormalize, with deviation accounting."""
    z = _check_unit(z)
    spec.validate_for(z.size)
    kept = apply_truncation(z, spec)

    removed = np.where(kept == 0.0, z, 0.0)
    removed_norm = float(np.linalg.norm(removed))
    z_norm = float(np.linalg.norm(z))
    truncated_energy = (removed_norm / z_norm) ** 2

    norm = float(np.linalg.norm(kept))
    if norm == 0.0:
        return TruncationResult(np.zeros_like(z), truncated_energy, 0, 1.0, is_zero=True)

    x = kept / norm
    if spec.kind is TruncationKind.SOFT:
        deviation = sin_between(x, z)
    else:
        # survivors are untouched, so sin(theta) is the norm of what was cut
        deviation = removed_norm / z_norm
    return TruncationResult(x, truncated_energy, int(np.count_nonzero(x)), deviation)


def soft_threshold(z: np.ndarray, lam: float) -> TruncationResult:
    """T-l1: S_lambda(z) / ||S_lambda(z)||."""
    return truncate(z, _spec(TruncationKind.SOFT, lam))


def hard_threshold(z: np.ndarray, lam: float) -> TruncationResult:
    """T-l0: zero entries with |z_i| <= lambda, then renormalize."""
    return truncate(z, _spec(TruncationKind.HARD, lam))


def truncate_by_sparsity(z: np.ndarray, lam: int) -> TruncationResult:
    """T-sp: zero the lambda smallest-magnitude entries."""
    return truncate(z, _spec(TruncationKind.SPARSITY, lam))


def truncate_by_energy(z: np.ndarray, lam: float) -> TruncationResult:
    """T-en: zero the smallest entries whose energy share stays <= lambda."""
    return truncate(z, _spec(TruncationKind.ENERGY, lam))


def truncate_columns(z: np.ndarray, spec: TruncationSpec) -> Tuple[np.ndarray, List[TruncationResult], int]:
    """Truncate every column of an orthonormal Z.

    Zero-flagged columns are replaced by the untruncated column. Returns
    the loadings, the per-column results, and how many columns fell back.
    """
    x = np.empty_like(z, dtype=float)
    results: List[TruncationResult] = []
    fallbacks = 0
    for i in range(z.shape[1]):
        res = truncate(z[:, i], spec)
        results.append(res)
        if res.is_zero:
            fallbacks += 1
            logger.warning(f"{spec} truncated column {i} to zero; keeping it untruncated")
            x[:, i] = z[:, i] / np.linalg.norm(z[:, i])
        else:
            x[:, i] = res.vector
    return x, results, fallbacks
