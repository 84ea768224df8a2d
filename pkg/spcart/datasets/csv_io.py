"""Dense matrix CSV files.

Format: comma-separated decimal floats, one matrix row per line. Lines
starting with `#` are comments. An optional first row of column names is
recognised when any of its fields fails to parse as a number.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from spcart.core.errors import InputError

PathLike = Union[str, Path]


def _is_number(field: str) -> bool:
    try:
        float(field)
    except (TypeError, ValueError):
        return False
    return True


def read_matrix_table(path: PathLike) -> Tuple[np.ndarray, Optional[List[str]]]:
    """Read a matrix and its header row, if it has one."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such matrix file: {path}")
    try:
        frame = pd.read_csv(path, header=None, comment="#", dtype=str,
                            skipinitialspace=True, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise InputError(f"{path} holds no matrix rows") from None
    except pd.errors.ParserError as exc:
        raise InputError(f"cannot parse {path}: {exc}") from None

    header: Optional[List[str]] = None
    first = [str(v).strip() for v in frame.iloc[0].tolist()]
    if not all(_is_number(v) for v in first):
        header = first
        frame = frame.iloc[1:]
    if frame.empty:
        raise InputError(f"{path} holds a header but no matrix rows")
    if frame.isna().to_numpy().any():
        raise InputError(f"{path} has rows of unequal length or empty fields")

    try:
        matrix = frame.to_numpy(dtype=str).astype(float)
    except ValueError as exc:
        raise InputError(f"{path} contains a non-numeric field: {exc}") from None
    if not np.all(np.isfinite(matrix)):
        raise InputError(f"{path} contains non-finite values")
    logger.debug(f"Read {matrix.shape[0]}x{matrix.shape[1]} matrix from {path}")
    return matrix, header


def read_matrix_csv(path: PathLike) -> np.ndarray:
    return read_matrix_table(path)[0]


def write_matrix_csv(matrix: np.ndarray, path: PathLike, header: Optional[List[str]] = None,
                     comments: Iterable[str] = ()) -> Path:
    """Write with 17 significant digits so values read back bit for bit."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim == 1:
        m = m[None, :]
    if header is not None and len(header) != m.shape[1]:
        raise InputError(f"header has {len(header)} names for {m.shape[1]} columns")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        if header is not None:
            fh.write(",".join(header) + "\n")
        np.savetxt(fh, m, fmt="%.17g", delimiter=",")
    logger.debug(f"Wrote {m.shape[0]}x{m.shape[1]} matrix to {path}")
    return path
