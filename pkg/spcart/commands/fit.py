"""`fit`: one method on one dataset."""

import time
from pathlib import Path
from typing import List

from loguru import logger

from spcart.commands.common import fit_method, input_stem, output_dir, resolve_input, write_records
from spcart.datasets.csv_io import write_matrix_csv
from spcart.models.config import Method, RunConfig
from spcart.models.report import RunRecord


def cmd_fit(cfg: RunConfig, run_id: str) -> List[Path]:
    """Fit, then write the loadings and one metrics record."""
    start_time = time.perf_counter()
    inp = resolve_input(cfg, cfg.method)
    spec = None if cfg.method is Method.PCA else cfg.truncation_for(cfg.lam, inp.p)
    logger.info(f"[{run_id}] fit {cfg.input} {cfg.method.value} {spec or ''} r={cfg.r}")

    report = fit_method(cfg.method, inp, spec, cfg)
    wall_time = time.perf_counter() - start_time

    out = output_dir(cfg)
    stem = f"fit_{input_stem(cfg)}_{cfg.method.value}"
    comments = [f"method={cfg.method.value}", f"truncation={spec or 'none'}", f"r={cfg.r}",
                f"iterations={report.iterations}", f"converged={report.converged}"]
    loadings_path = write_matrix_csv(report.loadings, out / f"{stem}_loadings.csv", comments=comments)
    metrics_path = write_records([RunRecord.from_report(report, wall_time)], out / f"{stem}_metrics", cfg.fmt)

    m = report.final_metrics
    logger.info(f"[{run_id}] Done SP={m.sp_mean:.4f} CPEV={m.cpev:.4f} NOR={m.nor:.4f} "
                f"cards={m.per_column_cardinality} in {wall_time * 1000:.1f}ms")
    return [loadings_path, metrics_path]
