"""`bounds`: theoretical bounds next to what a fit produced."""

import time
from pathlib import Path
from typing import List

from loguru import logger

from spcart.bounds.verify import fit_bound_reports, verify_ev_dmin, verify_truncation_bounds
from spcart.commands.common import fit_method, input_stem, output_dir, resolve_input, write_records
from spcart.core.errors import ArgumentError
from spcart.linalg.core import pca_loadings
from spcart.models.config import Method, RunConfig
from spcart.models.report import BoundRecord


def cmd_bounds(cfg: RunConfig, run_id: str) -> List[Path]:
    """One record per applicable bound of a fit, plus Monte-Carlo checks when --trials > 0."""
    start_time = time.perf_counter()
    if cfg.method is Method.PCA:
        raise ArgumentError("bounds compare a truncating method with PCA", flag="--method",
                            domain="spcart, rsvd-gp, rsvd-gpb or st")
    inp = resolve_input(cfg, cfg.method)
    spec = cfg.truncation_for(cfg.lam, inp.p)
    logger.info(f"[{run_id}] bounds {cfg.input} {cfg.method.value} {spec} r={cfg.r} trials={cfg.trials}")

    basis = pca_loadings(inp, cfg.r)
    report = fit_method(cfg.method, inp, spec, cfg, basis)
    checks = fit_bound_reports(inp, report, basis.loadings, spec)
    records = [BoundRecord.from_report(c) for c in checks]

    if cfg.trials > 0:
        summaries = verify_truncation_bounds(spec, inp.p, cfg.trials, cfg.seed, cfg.workers)
        summaries.append(verify_ev_dmin(inp.p, cfg.r, cfg.trials, cfg.seed, workers=cfg.workers))
        records.extend(BoundRecord.from_summary(s) for s in summaries)

    violated = [r.name for r in records if r.satisfied is False]
    if violated:
        logger.warning(f"[{run_id}] bounds violated: {', '.join(violated)}")
    path = write_records(records, output_dir(cfg) / f"bounds_{input_stem(cfg)}_{cfg.method.value}", cfg.fmt)
    logger.info(f"[{run_id}] Done {len(records)} bound records, {len(violated)} violated "
                f"in {(time.perf_counter() - start_time) * 1000:.1f}ms")
    return [path]
