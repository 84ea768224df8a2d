"""Bundled Pitprops correlation matrix."""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from spcart.core.errors import DataIntegrityError
from spcart.datasets.csv_io import read_matrix_table

PITPROPS_PATH = Path(__file__).parent / "data" / "pitprops.csv"
PITPROPS_SHA256 = "2160c5f7849708b828d572f43a2a7e61b51336a06942666928bdac7940f81414"
PITPROPS_VARIABLES = (
    "topdiam", "length", "moist", "testsg", "ovensg", "ringtop", "ringbut",
    "bowmax", "bowdist", "whorls", "clear", "knots", "diaknot",
)


def load_pitprops(path: Path = PITPROPS_PATH, sha256: str = PITPROPS_SHA256) -> np.ndarray:
    """13 x 13 Pitprops correlation matrix, checked against its recorded digest."""
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    if digest != sha256:
        raise DataIntegrityError(f"{path.name} checksum {digest[:12]}... does not match {sha256[:12]}...")
    matrix, header = read_matrix_table(path)
    if header is not None and tuple(header) != PITPROPS_VARIABLES:
        raise DataIntegrityError(f"{path.name} header names unexpected variables: {header}")
    if matrix.shape != (13, 13) or not np.array_equal(matrix, matrix.T):
        raise DataIntegrityError(f"{path.name} is not a symmetric 13x13 matrix")
    if not np.all(np.diag(matrix) == 1.0):
        raise DataIntegrityError(f"{path.name} diagonal is not all ones")
    return matrix
