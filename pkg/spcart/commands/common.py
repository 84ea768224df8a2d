"""Shared plumbing for CLI commands: inputs, method dispatch, output files."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, List, Optional

import pandas as pd
from loguru import logger
from pydantic import BaseModel

from spcart.core.config import get_settings
from spcart.core.errors import ArgumentError
from spcart.datasets.registry import registry
from spcart.models.config import Method, OutputFormat, PowerConfig, PowerMode, RunConfig, SpcartConfig, TruncationSpec
from spcart.models.matrix import InputKind, MatrixInput, PcaBasis
from spcart.models.report import FitReport
from spcart.solvers.power import rsvd_gp_fit, rsvd_gpb_fit
from spcart.solvers.spcart import pca_fit, spcart_fit, threshold_fit


def resolve_input(cfg: RunConfig, method: Optional[Method] = None) -> MatrixInput:
    """Dataset for `method`; block mode asks the registry for a data matrix."""
    kind = cfg.input_kind
    if method is Method.RSVD_GPB:
        if kind is InputKind.COVARIANCE:
            raise ArgumentError("rsvd-gpb needs a data matrix", flag="--input-kind", domain="data")
        kind = InputKind.DATA
    return registry.resolve(cfg.input, kind, center=cfg.center, remove_dc=cfg.remove_dc,
                            literal_artificial=cfg.literal_artificial)


def fit_method(method: Method, inp: MatrixInput, spec: Optional[TruncationSpec], cfg: RunConfig,
               basis: Optional[PcaBasis] = None) -> FitReport:
    """Run one method with the solver settings carried by `cfg`."""
    if method is Method.PCA:
        return pca_fit(inp, cfg.r, basis)
    if method is Method.ST:
        return threshold_fit(inp, cfg.r, spec, basis)
    if method is Method.SPCART:
        return spcart_fit(inp, SpcartConfig(
            r=cfg.r, truncation=spec, max_iterations=cfg.max_iterations,
            rel_change_tol=cfg.tol, restarts=cfg.restarts, seed=cfg.seed,
        ), basis)
    mode = PowerMode.BLOCK if method is Method.RSVD_GPB else PowerMode.DEFLATION
    config = PowerConfig(r=cfg.r, truncation=spec, adaptive=cfg.adaptive, mode=mode,
                         max_iterations=cfg.max_iterations, rel_change_tol=cfg.tol)
    return rsvd_gpb_fit(inp, config) if mode is PowerMode.BLOCK else rsvd_gp_fit(inp, config)


def output_dir(cfg: RunConfig) -> Path:
    out = cfg.output if cfg.output is not None else get_settings().output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def input_stem(cfg: RunConfig) -> str:
    return Path(cfg.input).stem


def _plain(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, default=str)
    return value


def write_records(records: Iterable[BaseModel], path: Path, fmt: OutputFormat,
                  exclude: Optional[set] = None) -> Path:
    """CSV rounds floats to SPCART_CSV_DIGITS significant digits; JSON lines keep full precision."""
    rows: List[dict] = [r.model_dump(mode="json", exclude=exclude) for r in records]
    path = path.with_suffix(".jsonl" if fmt is OutputFormat.JSONL else ".csv")
    if fmt is OutputFormat.JSONL:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for row in rows:
                fh.write(json.dumps(row, sort_keys=False) + "\n")
    else:
        frame = pd.DataFrame([{k: _plain(v) for k, v in row.items()} for row in rows])
        digits = get_settings().csv_digits
        frame.to_csv(path, index=False, float_format=f"%.{digits}g", lineterminator="\n")
    logger.debug(f"Wrote {len(rows)} records to {path}")
    return path
