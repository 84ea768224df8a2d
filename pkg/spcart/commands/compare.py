"""`compare`: a (method, lambda) sweep on one dataset."""

import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

import pandas as pd
from loguru import logger

from spcart.commands.common import fit_method, input_stem, output_dir, resolve_input, write_records
from spcart.models.config import Method, RunConfig
from spcart.models.report import RunRecord

Cell = Tuple[Method, Optional[str]]


def sweep_cells(cfg: RunConfig) -> List[Cell]:
    """Every (method, lambda token) pair; PCA takes no lambda and appears once."""
    methods = cfg.methods or [cfg.method]
    tokens = cfg.lambdas or [cfg.lam]
    cells: List[Cell] = []
    for method in dict.fromkeys(methods):
        if method is Method.PCA:
            cells.append((method, None))
        else:
            cells.extend((method, token) for token in dict.fromkeys(tokens))
    return cells


def _run_cell(cfg: RunConfig, cell: Cell) -> RunRecord:
    method, token = cell
    started = time.perf_counter()
    inp = resolve_input(cfg, method)
    spec = None if token is None else cfg.truncation_for(token, inp.p)
    report = fit_method(method, inp, spec, cfg)
    return RunRecord.from_report(report, time.perf_counter() - started)


def cmd_compare(cfg: RunConfig, run_id: str) -> List[Path]:
    """Run the sweep and write one row per cell, sorted by (method, lambda)."""
    start_time = time.perf_counter()
    cells = sweep_cells(cfg)
    logger.info(f"[{run_id}] compare {cfg.input}: {len(cells)} cells on {cfg.workers} worker(s)")

    # resolve inputs up front so the registry cache is warm before threads start
    for method in {m for m, _ in cells}:
        resolve_input(cfg, method)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(lambda cell: _run_cell(cfg, cell), cells))
    else:
        records = [_run_cell(cfg, cell) for cell in cells]

    frame = pd.DataFrame({
        "method": [r.method for r in records],
        "lam": [r.lam if r.lam is not None else -1.0 for r in records],
        "pos": range(len(records)),
    }).sort_values(["method", "lam", "pos"], kind="mergesort")
    ordered = [records[i] for i in frame["pos"]]

    path = write_records(ordered, output_dir(cfg) / f"compare_{input_stem(cfg)}", cfg.fmt)
    logger.info(f"[{run_id}] Done {len(ordered)} rows in {(time.perf_counter() - start_time) * 1000:.1f}ms")
    return [path]
