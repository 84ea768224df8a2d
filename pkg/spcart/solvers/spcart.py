"""SPCArt: sparse loadings by rotating PCA loadings and truncating them."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import ValidationError

from spcart.bounds.verify import ev_cos_check, ev_dmin_bound
from spcart.core.errors import ArgumentError, DegeneracyError
from spcart.linalg.core import pca_loadings, polar, random_orthogonal
from spcart.metrics.criteria import ZERO_TOL, cpev, nonorthogonality, snapshot
from spcart.models.config import SpcartConfig, TruncationKind, TruncationSpec
from spcart.models.matrix import MatrixInput, PcaBasis
from spcart.models.report import FitReport, IterationRecord
from spcart.truncation.operators import truncate_columns


def align_signs(x: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Flip columns of x that point away from the matching reference column."""
    signs = np.sign(np.sum(x * reference, axis=0))
    signs[signs == 0] = 1.0
    return x * signs


def rel_change(x: np.ndarray, previous: np.ndarray) -> float:
    """||X - X_prev||_F / sqrt(r), after sign alignment."""
    return float(np.linalg.norm(align_signs(x, previous) - previous) / np.sqrt(x.shape[1]))


def spcart_objective(v: np.ndarray, x: np.ndarray, rotation: np.ndarray, spec: TruncationSpec) -> float:
    """Value of the rotation objective for the current (X, R)."""
    fit = float(np.linalg.norm(v - x @ rotation) ** 2)
    if spec.kind is TruncationKind.SOFT:
        return 0.5 * fit + spec.lam * float(np.abs(x).sum())
    if spec.kind is TruncationKind.HARD:
        return fit + spec.lam ** 2 * int(np.count_nonzero(x))
    return fit


@dataclass
class _Run:
    loadings: np.ndarray
    rotation: np.ndarray
    iterations: int = 0
    converged: bool = False
    objective: float = float("inf")
    trace: List[IterationRecord] = field(default_factory=list)
    iterates: List[np.ndarray] = field(default_factory=list)
    zero_column_events: int = 0


def _alternate(inp: MatrixInput, v: np.ndarray, rotation: np.ndarray, config: SpcartConfig) -> _Run:
    spec = config.truncation
    r = v.shape[1]
    run = _Run(loadings=v, rotation=rotation)
    previous = v
    recovered = False

    for t in range(1, config.max_iterations + 1):
        z = v @ rotation.T
        x, results, fallbacks = truncate_columns(z, spec)
        run.zero_column_events += fallbacks
        change = rel_change(x, previous)
        objective = spcart_objective(v, x, rotation, spec)

        record = IterationRecord(
            iteration=t,
            rel_change=change,
            truncated_energy_mean=float(np.mean([res.truncated_energy for res in results])),
            sp=float(np.mean(np.abs(x) <= ZERO_TOL)),
            objective=objective,
        )
        if config.record_trace:
            record.cpev = cpev(inp, x)
            record.nor = nonorthogonality(x)[0] if r >= 2 else 0.0
            run.iterates.append(x.copy())
        run.trace.append(record)
        logger.debug(f"iter {t}: objective={objective:.6g} rel_change={change:.3e} "
                     f"truncated={record.truncated_energy_mean:.4f}")

        run.loadings, run.rotation, run.iterations, run.objective = x, rotation, t, objective
        if change < config.rel_change_tol:
            run.converged = True
            break
        if t == config.max_iterations:
            break

        try:
            rotation = polar(x.T @ v)
        except DegeneracyError:
            if recovered:
                raise DegeneracyError(f"rotation update degenerate again at iteration {t}") from None
            logger.warning(f"degenerate rotation update at iteration {t}; restarting from R = I")
            rotation = np.eye(r)
            recovered = True
        previous = x

    if not run.converged:
        logger.warning(f"SPCArt did not converge in {config.max_iterations} iterations "
                       f"(last rel_change {run.trace[-1].rel_change:.3e})")
    return run


def spcart_fit(inp: MatrixInput, config: SpcartConfig, basis: Optional[PcaBasis] = None) -> FitReport:
    """Fit r sparse loadings by alternating truncation and rotation.

    Starts at R = I; with `restarts > 0` also runs from seeded random
    rotations and keeps the run with the lowest final objective.
    """
    started = time.perf_counter()
    spec = config.truncation.validate_for(inp.p)
    basis = basis if basis is not None else pca_loadings(inp, config.r)
    if basis.r != config.r:
        raise ArgumentError(f"PCA basis has {basis.r} loadings, config asks for {config.r}",
                            flag="--r", domain=str(basis.r))
    v = np.array(basis.loadings)

    best = _alternate(inp, v, np.eye(config.r), config)
    if config.restarts:
        rng = np.random.default_rng(config.seed)
        for k in range(config.restarts):
            run = _alternate(inp, v, random_orthogonal(config.r, rng), config)
            logger.debug(f"restart {k + 1}: objective={run.objective:.6g}")
            if run.objective < best.objective:
                best = run

    checks = [ev_dmin_bound(inp, best.loadings, v)]
    if spec.kind is TruncationKind.ENERGY:
        checks.append(ev_cos_check(inp, best.loadings, v @ best.rotation.T, v, converged=best.converged))

    report = FitReport(
        method="spcart",
        truncation=spec,
        loadings=best.loadings,
        rotation=best.rotation,
        iterations=best.iterations,
        converged=best.converged,
        objective=best.objective,
        trace=best.trace,
        iterates=best.iterates,
        final_metrics=snapshot(inp, best.loadings),
        zero_column_events=best.zero_column_events,
        bound_checks=checks,
    )
    logger.info(f"SPCArt {spec} r={config.r}: {best.iterations} iterations, converged={best.converged}, "
                f"CPEV={report.final_metrics.cpev:.4f} in {(time.perf_counter() - started) * 1000:.1f}ms")
    return report


def simple_thresholding(inp: MatrixInput, r: int, lam: float, basis: Optional[PcaBasis] = None) -> np.ndarray:
    """ST: hard-threshold the PCA loadings once and renormalize."""
    try:
        spec = TruncationSpec(kind=TruncationKind.HARD, lam=lam)
    except ValidationError as exc:
        raise ArgumentError(exc.errors()[0]["msg"], flag="--lambda", domain="[0, 1)") from None
    basis = basis if basis is not None else pca_loadings(inp, r)
    x, _, _ = truncate_columns(np.array(basis.loadings) @ np.eye(r).T, spec)
    return x


def threshold_fit(inp: MatrixInput, r: int, spec: TruncationSpec, basis: Optional[PcaBasis] = None) -> FitReport:
    """One truncation of the PCA loadings with any truncation type, as a report."""
    spec = spec.validate_for(inp.p)
    basis = basis if basis is not None else pca_loadings(inp, r)
    x, _, fallbacks = truncate_columns(np.array(basis.loadings) @ np.eye(r).T, spec)
    return FitReport(
        method="st",
        truncation=spec,
        loadings=x,
        rotation=np.eye(r),
        iterations=1,
        final_metrics=snapshot(inp, x),
        zero_column_events=fallbacks,
        bound_checks=[ev_dmin_bound(inp, x, np.array(basis.loadings))],
    )


def pca_fit(inp: MatrixInput, r: int, basis: Optional[PcaBasis] = None) -> FitReport:
    """Plain PCA loadings wrapped as a report, the dense reference point."""
    basis = basis if basis is not None else pca_loadings(inp, r)
    v = np.array(basis.loadings)
    return FitReport(method="pca", loadings=v, rotation=np.eye(r), iterations=0, final_metrics=snapshot(inp, v))
