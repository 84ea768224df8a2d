"""Shared fixtures: bundled datasets, a decaying-spectrum data set, isolated output."""

import numpy as np
import pytest

from spcart.core.config import get_settings
from spcart.datasets.pitprops import load_pitprops
from spcart.datasets.registry import registry
from spcart.datasets.synthetic import synthetic_covariance
from spcart.models.matrix import MatrixInput


@pytest.fixture(scope="session")
def pitprops_input() -> MatrixInput:
    return MatrixInput.from_covariance(load_pitprops())


@pytest.fixture(scope="session")
def synthetic_input() -> MatrixInput:
    return MatrixInput.from_covariance(synthetic_covariance())


@pytest.fixture(scope="session")
def decaying_data() -> MatrixInput:
    """200 x 50 data matrix with singular values 0.7^i and random dense singular vectors."""
    rng = np.random.default_rng(7)
    n, p = 200, 50
    u, _ = np.linalg.qr(rng.standard_normal((n, p)))
    v, _ = np.linalg.qr(rng.standard_normal((p, p)))
    sigma = 0.7 ** np.arange(p)
    return MatrixInput.from_data((u * sigma) @ v.T)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    out = tmp_path / "results"
    monkeypatch.setenv("SPCART_OUTPUT_DIR", str(out))
    get_settings.cache_clear()
    yield out
    get_settings.cache_clear()


@pytest.fixture(autouse=True)
def fresh_registry():
    registry.clear()
    yield
    registry.clear()
