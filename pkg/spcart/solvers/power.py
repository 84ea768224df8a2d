"""rSVD-GP (deflation) and rSVD-GPB (block) with adaptive thresholds.

Both truncate power-iteration steps. With `adaptive=False` the threshold
is applied to the raw iterate, which is the plain GPower and
GPowerB behaviour; the default scales it with the iterate's norm.
"""

from __future__ import annotations

import time
from typing import List, Union

import numpy as np
from loguru import logger

from spcart.core.errors import ArgumentError, DegeneracyError
from spcart.linalg.core import polar, thin_svd
from spcart.metrics.criteria import ZERO_TOL, snapshot
from spcart.models.config import PowerConfig, PowerMode, TruncationKind, TruncationSpec
from spcart.models.matrix import CenteredData, MatrixInput
from spcart.models.report import FitReport, IterationRecord
from spcart.solvers.spcart import rel_change
from spcart.truncation.operators import apply_truncation, threshold


def _removed_share(u: np.ndarray, kept: np.ndarray) -> float:
    energy = float(u @ u)
    return float(np.sum(u[kept == 0.0] ** 2) / energy) if energy else 0.0


def tpower_step(c: np.ndarray, x: np.ndarray, lam: int) -> np.ndarray:
    """One truncated power step: zero the `lam` smallest entries of Cx, renormalize.

    `lam` counts entries zeroed, as T-sp does; a cardinality-k iterate in
    the usual truncated-power notation is `lam = p - k`.
    """
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != x.shape[0]:
        raise ArgumentError(f"operator {c.shape} and vector {x.shape} do not match")
    p = x.shape[0]
    if int(lam) != lam or not 0 <= lam <= p - 1:
        raise ArgumentError(f"lambda={lam} must count entries to zero", flag="--lambda",
                            domain=f"integer in [0, {p - 1}]")
    z = c @ x
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        raise DegeneracyError("truncated power step produced a zero vector")
    kept = apply_truncation(z / norm, TruncationSpec(kind=TruncationKind.SPARSITY, lam=int(lam)))
    kept_norm = float(np.linalg.norm(kept))
    if kept_norm == 0.0:
        raise DegeneracyError("truncated power step produced a zero vector")
    return kept / kept_norm


class _Deflated:
    """Working copy of the input that shrinks by one direction per loading."""

    def __init__(self, inp: MatrixInput):
        self.is_data = inp.is_data
        self.matrix = np.array(inp.matrix)

    def start_index(self) -> int:
        """Variable with the largest column norm (data) or variance (covariance)."""
        if self.is_data:
            return int(np.argmax(np.linalg.norm(self.matrix, axis=0)))
        return int(np.argmax(np.diag(self.matrix)))

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.is_data:
            return self.matrix.T @ (self.matrix @ x)
        return self.matrix @ x

    def deflate(self, x: np.ndarray) -> None:
        if self.is_data:
            self.matrix = self.matrix - np.outer(self.matrix @ x, x)
        else:
            proj = np.eye(x.shape[0]) - np.outer(x, x)
            self.matrix = proj @ self.matrix @ proj

    def residual(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(self.matrix @ x))


def _check_mode(config: PowerConfig, mode: PowerMode) -> TruncationSpec:
    if config.mode is not mode:
        raise ArgumentError(f"config is in {config.mode.value} mode, expected {mode.value}",
                            flag="--method")
    if not config.adaptive and config.truncation.kind in (TruncationKind.SPARSITY, TruncationKind.ENERGY):
        logger.debug(f"{config.truncation} is scale-free; raw and adaptive thresholds coincide")
    return config.truncation


def rsvd_gp_fit(inp: MatrixInput, config: PowerConfig) -> FitReport:
    """Extract r sparse loadings one at a time, deflating after each."""
    started = time.perf_counter()
    spec = _check_mode(config, PowerMode.DEFLATION).validate_for(inp.p)
    p = inp.p
    if config.r > p:
        raise ArgumentError(f"r={config.r} exceeds p={p}", flag="--r", domain=f"1..{p}")

    work = _Deflated(inp)
    loadings = np.zeros((p, config.r))
    trace: List[IterationRecord] = []
    counts: List[int] = []
    converged_all = True
    zero_events = 0

    for i in range(config.r):
        x = np.zeros(p)
        x[work.start_index()] = 1.0
        converged = False
        t = 0
        for t in range(1, config.max_iterations + 1):
            g = work.apply(x)
            if config.adaptive:
                norm = float(np.linalg.norm(g))
                if norm == 0.0:
                    zero_events += 1
                    logger.warning(f"loading {i}: deflated operator is zero; keeping the start vector")
                    converged = True
                    break
                z = g / norm
            else:
                energy = float(x @ g)
                if energy <= 0.0:
                    zero_events += 1
                    logger.warning(f"loading {i}: deflated operator is zero; keeping the start vector")
                    converged = True
                    break
                z = g / np.sqrt(energy)

            kept = apply_truncation(z, spec)
            kept_norm = float(np.linalg.norm(kept))
            if kept_norm == 0.0:
                zero_events += 1
                logger.warning(f"loading {i}, iteration {t}: {spec} removed everything; using the untruncated iterate")
                x_new = z / np.linalg.norm(z)
            else:
                x_new = kept / kept_norm

            change = rel_change(x_new[:, None], x[:, None])
            trace.append(IterationRecord(
                iteration=t,
                component=i,
                rel_change=change,
                truncated_energy_mean=_removed_share(z, kept),
                sp=float(np.mean(np.abs(x_new) <= ZERO_TOL)),
            ))
            x = x_new
            if change < config.rel_change_tol:
                converged = True
                break

        if not converged:
            converged_all = False
            logger.warning(f"loading {i} did not converge in {config.max_iterations} iterations")
        loadings[:, i] = x
        counts.append(t)
        work.deflate(x)
        logger.debug(f"loading {i}: {t} iterations, cardinality {int(np.count_nonzero(x))}, "
                     f"residual after deflation {work.residual(x):.2e}")

    report = FitReport(
        method="rsvd-gp",
        truncation=spec,
        loadings=loadings,
        iterations=int(sum(counts)),
        converged=converged_all,
        trace=trace if config.record_trace else [],
        final_metrics=snapshot(inp, loadings),
        component_iterations=counts,
        zero_column_events=zero_events,
    )
    logger.info(f"rSVD-GP {spec} r={config.r} adaptive={config.adaptive}: iterations {counts}, "
                f"CPEV={report.final_metrics.cpev:.4f} in {(time.perf_counter() - started) * 1000:.1f}ms")
    return report


def _block_truncate(z: np.ndarray, spec: TruncationSpec, adaptive: bool) -> tuple[np.ndarray, int]:
    x = np.empty_like(z)
    fallbacks = 0
    for i in range(z.shape[1]):
        col = threshold(z[:, i], spec, adaptive=adaptive)
        if not np.any(col):
            fallbacks += 1
            logger.warning(f"{spec} removed column {i}; using the untruncated column")
            col = z[:, i]
        x[:, i] = col
    return x, fallbacks


def _unit(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=0)
    norms[norms == 0.0] = 1.0
    return x / norms


def rsvd_gpb_fit(data: Union[MatrixInput, CenteredData], config: PowerConfig) -> FitReport:
    """Extract r sparse loadings together with a shared orthonormal Y."""
    started = time.perf_counter()
    inp = data.as_input() if isinstance(data, CenteredData) else data
    if not inp.is_data:
        raise ArgumentError("block mode needs a data matrix, not a covariance",
                            flag="--input-kind", domain="data")
    spec = _check_mode(config, PowerMode.BLOCK).validate_for(inp.p)
    a = np.array(inp.matrix)
    kmax = min(a.shape)
    if config.r > kmax:
        raise ArgumentError(f"r={config.r} exceeds min(n, p)={kmax}", flag="--r", domain=f"1..{kmax}")

    svd = thin_svd(a, config.r)
    y = np.array(svd.left_factor)
    previous = np.array(svd.right_factor)
    x = previous
    trace: List[IterationRecord] = []
    converged = False
    zero_events = 0
    t = 0

    for t in range(1, config.max_iterations + 1):
        z = a.T @ y
        x, fallbacks = _block_truncate(z, spec, config.adaptive)
        zero_events += fallbacks
        unit = _unit(x)
        change = rel_change(unit, previous)
        trace.append(IterationRecord(
            iteration=t,
            rel_change=change,
            truncated_energy_mean=float(np.mean([_removed_share(z[:, i], x[:, i]) for i in range(z.shape[1])])),
            sp=float(np.mean(np.abs(x) <= ZERO_TOL)),
        ))
        logger.debug(f"block iter {t}: rel_change={change:.3e}")
        if change < config.rel_change_tol:
            converged = True
            break
        if t == config.max_iterations:
            break
        previous = unit
        try:
            y = polar(a @ x)
        except DegeneracyError as exc:
            # Y stays put, so the next pass repeats X and stops
            zero_events += 1
            logger.warning(f"block iter {t}: truncated loadings are rank-deficient ({exc}); keeping the previous Y")

    if not converged:
        logger.warning(f"rSVD-GPB did not converge in {config.max_iterations} iterations")
    loadings = _unit(x)
    report = FitReport(
        method="rsvd-gpb",
        truncation=spec,
        loadings=loadings,
        iterations=t,
        converged=converged,
        trace=trace if config.record_trace else [],
        final_metrics=snapshot(inp, loadings),
        component_iterations=[t] * config.r,
        zero_column_events=zero_events,
    )
    logger.info(f"rSVD-GPB {spec} r={config.r} adaptive={config.adaptive}: {t} iterations, "
                f"CPEV={report.final_metrics.cpev:.4f} in {(time.perf_counter() - started) * 1000:.1f}ms")
    return report
