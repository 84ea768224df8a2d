"""Dataset resolution with caching."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Tuple

from cachetools import TTLCache
from loguru import logger

from spcart.core.config import get_settings
from spcart.core.errors import InputError
from spcart.datasets.csv_io import read_matrix_csv
from spcart.datasets.pitprops import load_pitprops
from spcart.datasets.preprocess import artificial_data_from_covariance
from spcart.datasets.preprocess import remove_dc as remove_row_means
from spcart.datasets.synthetic import synthetic_covariance
from spcart.linalg.core import center_columns
from spcart.models.matrix import InputKind, MatrixInput

settings = get_settings()

BUILTIN = {
    "pitprops": load_pitprops,
    "synthetic": synthetic_covariance,
}


class DatasetRegistry:
    """Maps builtin ids and CSV paths to solver inputs, with TTL caching."""

    def __init__(self, ttl_s: Optional[float] = None, maxsize: int = 32):
        self.cache = TTLCache(maxsize=maxsize, ttl=ttl_s if ttl_s is not None else settings.cache_ttl_s)

    def _key(self, source: str, kind: Optional[InputKind], center: bool, dc: bool, literal: bool) -> Tuple:
        if source in BUILTIN:
            return (source, kind, center, dc, literal)
        path = Path(source).resolve()
        stamp = path.stat().st_mtime_ns if path.is_file() else None
        return (str(path), stamp, kind, center, dc, literal)

    def resolve(self, source: str, input_kind: Optional[InputKind] = None, center: bool = True,
                remove_dc: bool = False, literal_artificial: bool = False) -> MatrixInput:
        """Load and preprocess a dataset.

        Builtins are covariances; asking for them as data yields artificial
        data with the same loadings. CSV files default to data matrices.
        Centering and DC removal apply to data read from files only.
        """
        key = self._key(source, input_kind, center, remove_dc, literal_artificial)
        if key in self.cache:
            logger.debug(f"Returning dataset '{source}' from cache")
            return self.cache[key]

        if source in BUILTIN:
            cov = BUILTIN[source]()
            if input_kind is InputKind.DATA:
                inp = MatrixInput.from_data(artificial_data_from_covariance(cov, literal=literal_artificial))
            else:
                inp = MatrixInput.from_covariance(cov)
        else:
            path = Path(source)
            if not path.is_file():
                raise InputError(f"'{source}' is neither a builtin dataset ({', '.join(BUILTIN)}) nor a file")
            matrix = read_matrix_csv(path)
            if input_kind is InputKind.COVARIANCE:
                inp = MatrixInput.from_covariance(matrix)
            else:
                if remove_dc:
                    matrix = remove_row_means(matrix)
                inp = center_columns(matrix).as_input() if center else MatrixInput.from_data(matrix)

        logger.info(f"Resolved dataset '{source}' as {inp.kind.value} with p={inp.p}"
                    + (f", n={inp.n}" if inp.is_data else ""))
        self.cache[key] = inp
        return inp

    def clear(self) -> None:
        self.cache.clear()


# Global registry instance
registry = DatasetRegistry()
