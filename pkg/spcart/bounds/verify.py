"""Checks of the theoretical bounds against runs and random draws."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np
from loguru import logger
from scipy import linalg

from spcart.bounds.theory import (
    coarse_ten_guarantee,
    ev_cos_bound,
    nonortho_bound,
    tl1_deviation_bounds,
    truncation_bounds,
)
from spcart.core.errors import InputError
from spcart.linalg.core import pca_loadings
from spcart.metrics.criteria import deviation_angle, explained_variance, sparsity
from spcart.models.config import TruncationKind, TruncationSpec
from spcart.models.matrix import MatrixInput
from spcart.models.report import BoundReport, ContainmentSummary, FitReport, Interval
from spcart.truncation.operators import truncate

UNIFORM_ANGLE_TOL = 0.02
ROW_SUM_SLACK = 1e-9
SHARD_SIZE = 250


def _unit_columns(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=0)
    norms[norms == 0.0] = 1.0
    return x / norms


def ev_dmin_bound(inp: MatrixInput, x: np.ndarray, v: np.ndarray) -> BoundReport:
    """EV(X) >= d_min^2 EV(V), d_min the smallest singular value of X^T V."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 2 or x.shape != v.shape or x.shape[0] != inp.p:
        raise InputError(f"loadings {x.shape} and PCA basis {v.shape} must both be p x r with p={inp.p}")
    d_min = float(linalg.svdvals(x.T @ v).min())
    ev_v = explained_variance(inp, v)
    bound = d_min ** 2 * ev_v
    return BoundReport.check(
        "ev_dmin",
        Interval(lo=bound, hi=math.inf),
        explained_variance(inp, x),
        context={"d_min": d_min, "ev_v": ev_v, "r": int(x.shape[1]), "p": inp.p},
    )


def ev_cos_check(inp: MatrixInput, x: np.ndarray, z: np.ndarray, v: np.ndarray,
                 uniform_tol: float = UNIFORM_ANGLE_TOL, converged: bool = True) -> BoundReport:
    """EVcos bound, reported only for a converged run whose uniform deviation and row sums hold."""
    if not converged:
        logger.info("EVcos skipped: run did not converge")
        return BoundReport.skipped("ev_cos", "run did not converge")
    x = _unit_columns(np.asarray(x, dtype=float))
    r = x.shape[1]
    thetas = [deviation_angle(x[:, i], z[:, i]) for i in range(r)]
    cos = z.T @ x
    row_sums = np.sum(cos ** 2, axis=1)
    context = {"theta_min": min(thetas), "theta_max": max(thetas), "row_sum_max": float(row_sums.max()), "r": r}

    if max(thetas) - min(thetas) > uniform_tol:
        note = f"deviation angles spread {max(thetas) - min(thetas):.4f} rad > {uniform_tol}"
        logger.info(f"EVcos skipped: {note}")
        return BoundReport.skipped("ev_cos", note, context=context)
    if np.any(row_sums > 1.0 + ROW_SUM_SLACK):
        note = f"row sum of squared cosines {row_sums.max():.6f} > 1"
        logger.info(f"EVcos skipped: {note}")
        return BoundReport.skipped("ev_cos", note, context=context)

    ev_v = explained_variance(inp, v)
    bound = ev_cos_bound(max(thetas), r, ev_v)
    return BoundReport.check(
        "ev_cos",
        Interval(lo=bound, hi=math.inf),
        explained_variance(inp, x),
        vacuous=bound < 0.0,
        context={**context, "ev_v": ev_v},
    )


def fit_bound_reports(inp: MatrixInput, report: FitReport, v: np.ndarray,
                      spec: TruncationSpec) -> List[BoundReport]:
    """Every bound that applies to a fitted run, one report each."""
    x = report.loadings
    p, r = x.shape
    reports: List[BoundReport] = []
    ctx = {"lambda": spec.lam, "p": p, "r": r, "truncation": spec.kind.value}

    if report.rotation is None:
        note = f"{report.method} has no rotated PCA loadings to measure deviation against"
        reports.append(BoundReport.skipped("deviation", note, context=ctx))
        reports.append(BoundReport.skipped("ev_cos", note, context=ctx))
        reports.append(ev_dmin_bound(inp, x, v))
        return reports

    z = v @ report.rotation.T
    absolute = truncation_bounds(spec, p)
    thetas = []
    for i in range(r):
        col = {**ctx, "column": i}
        theta = deviation_angle(x[:, i], z[:, i])
        thetas.append(theta)
        reports.append(BoundReport.check("sparsity", absolute.sparsity, sparsity(x[:, i]), context=col))
        reports.append(BoundReport.check("deviation", absolute.deviation, math.sin(theta), context=col))
        if spec.kind is TruncationKind.SOFT:
            res = truncate(z[:, i], spec)
            rel = tl1_deviation_bounds(res.truncated_energy, spec.lam, res.cardinality)
            reports.append(BoundReport.check("deviation_relative", rel, math.sin(theta), context=col))

    for i in range(r):
        for j in range(i + 1, r):
            cos = abs(float(x[:, i] @ x[:, j])) / (np.linalg.norm(x[:, i]) * np.linalg.norm(x[:, j]))
            hi = nonortho_bound(thetas[i], thetas[j])
            reports.append(BoundReport.check("nonorthogonality", Interval(lo=0.0, hi=hi), cos,
                                             vacuous=hi >= 1.0, context={**ctx, "pair": [i, j]}))

    reports.append(ev_dmin_bound(inp, x, v))
    reports.append(ev_cos_check(inp, x, z, v, converged=report.converged))
    if spec.kind is TruncationKind.ENERGY:
        ev_v = explained_variance(inp, v)
        reports.append(BoundReport.check(
            "ev_coarse_ten",
            Interval(lo=coarse_ten_guarantee(spec.lam, ev_v), hi=math.inf),
            explained_variance(inp, x),
            note="rule of thumb for small lambda, not a theorem",
            context={**ctx, "ev_v": ev_v},
        ))
    return reports


def _shard_seeds(seed: int, trials: int) -> List[tuple[np.random.SeedSequence, int]]:
    # shard layout depends only on trials, so results do not depend on workers
    sizes = [min(SHARD_SIZE, trials - start) for start in range(0, trials, SHARD_SIZE)]
    return list(zip(np.random.SeedSequence(seed).spawn(len(sizes)), sizes))


def _run_shards(fn, seed: int, trials: int, workers: int) -> List[Dict[str, List[bool | float]]]:
    shards = _shard_seeds(seed, trials)
    if workers <= 1:
        return [fn(ss, size) for ss, size in shards]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda item: fn(*item), shards))


def _summaries(parts: List[Dict[str, List]], names: Dict[str, Optional[Interval]],
               trials: int, context: Dict) -> List[ContainmentSummary]:
    out = []
    for name, interval in names.items():
        values = [v for part in parts for v in part[name]]
        oks = [ok for part in parts for ok in part[name + ":ok"]]
        out.append(ContainmentSummary(
            name=name,
            trials=trials,
            violations=int(len(oks) - sum(oks)),
            theoretical=interval,
            empirical_min=float(min(values)),
            empirical_max=float(max(values)),
            context=context,
        ))
    return out


def verify_truncation_bounds(spec: TruncationSpec, p: int, trials: int = 1000, seed: int = 0,
                             workers: int = 1) -> List[ContainmentSummary]:
    """Truncate random unit vectors and count bound violations."""
    spec.validate_for(p)
    bounds = truncation_bounds(spec, p)
    kind = spec.kind.value
    soft = spec.kind is TruncationKind.SOFT
    hard_spec = TruncationSpec(kind=TruncationKind.HARD, lam=spec.lam) if soft else None

    def shard(ss: np.random.SeedSequence, size: int) -> Dict[str, List]:
        rng = np.random.default_rng(ss)
        acc: Dict[str, List] = {}
        def add(name: str, value: float, ok: bool) -> None:
            acc.setdefault(name, []).append(value)
            acc.setdefault(name + ":ok", []).append(ok)

        for _ in range(size):
            z = rng.standard_normal(p)
            z /= np.linalg.norm(z)
            res = truncate(z, spec)
            s = 1.0 if res.is_zero else res.sparsity
            add(f"{kind}.sparsity", s, bounds.sparsity.contains(s))
            add(f"{kind}.deviation", res.deviation_sin, bounds.deviation.contains(res.deviation_sin))
            if soft:
                rel = tl1_deviation_bounds(res.truncated_energy, spec.lam, res.cardinality)
                add("l1.deviation_relative", res.deviation_sin, rel.contains(res.deviation_sin))
                hard = truncate(z, hard_spec)
                gap = res.deviation_sin - hard.deviation_sin
                add("l1.soft_minus_hard", gap, gap >= -1e-12)
        return acc

    parts = _run_shards(shard, seed, trials, workers)
    names: Dict[str, Optional[Interval]] = {
        f"{kind}.sparsity": bounds.sparsity,
        f"{kind}.deviation": bounds.deviation,
    }
    if soft:
        names["l1.deviation_relative"] = None
        names["l1.soft_minus_hard"] = Interval(lo=0.0, hi=1.0)
    summaries = _summaries(parts, names, trials, {"lambda": spec.lam, "p": p, "truncation": kind, "seed": seed})
    for s in summaries:
        if not s.satisfied:
            logger.error(f"{s.name}: {s.violations}/{trials} draws violate the bound (lambda={spec.lam}, p={p})")
    return summaries


def verify_ev_dmin(p: int, r: int, trials: int = 500, seed: int = 0, n: Optional[int] = None,
                   workers: int = 1) -> ContainmentSummary:
    """EVdmin on random data with random unit-column X; returns EV(X) - bound margins."""
    n = n or 2 * p

    def shard(ss: np.random.SeedSequence, size: int) -> Dict[str, List]:
        rng = np.random.default_rng(ss)
        margins, oks = [], []
        for _ in range(size):
            inp = MatrixInput.from_data(rng.standard_normal((n, p)))
            v = pca_loadings(inp, r).loadings
            x = _unit_columns(rng.standard_normal((p, r)))
            rep = ev_dmin_bound(inp, x, v)
            margins.append(rep.empirical - rep.theoretical.lo)
            oks.append(bool(rep.satisfied))
        return {"ev_dmin": margins, "ev_dmin:ok": oks}

    parts = _run_shards(shard, seed, trials, workers)
    return _summaries(parts, {"ev_dmin": None}, trials, {"p": p, "r": r, "n": n, "seed": seed})[0]
