"""Three-factor synthetic model with ten observed variables."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from spcart.core.errors import ArgumentError


class SyntheticModel(BaseModel):
    """h1 ~ N(0, var_h1), h2 ~ N(0, var_h2), h3 = mix . (h1, h2) + e.

    Observed variable i is the factor `groups[i]` plus unit noise.
    """
    model_config = ConfigDict(frozen=True)

    var_h1: float = Field(290.0, gt=0.0)
    var_h2: float = Field(300.0, gt=0.0)
    mix: Tuple[float, float] = (-0.3, 0.925)
    noise_var: float = Field(1.0, ge=0.0)
    groups: Tuple[int, ...] = (0, 0, 0, 0, 1, 1, 1, 1, 2, 2)

    @model_validator(mode="after")
    def _check_groups(self) -> "SyntheticModel":
        if not self.groups or any(g not in (0, 1, 2) for g in self.groups):
            raise ValueError("groups must map every variable to factor 0, 1 or 2")
        return self

    @property
    def p(self) -> int:
        return len(self.groups)

    def factor_covariance(self) -> np.ndarray:
        """Covariance of (h1, h2, h3)."""
        a, b = self.mix
        v1, v2 = self.var_h1, self.var_h2
        return np.array([
            [v1, 0.0, a * v1],
            [0.0, v2, b * v2],
            [a * v1, b * v2, a * a * v1 + b * b * v2 + self.noise_var],
        ])

    def factor_loadings(self) -> np.ndarray:
        """p x 3 indicator matrix of the variable-to-factor map."""
        out = np.zeros((self.p, 3))
        out[np.arange(self.p), list(self.groups)] = 1.0
        return out


def synthetic_covariance(model: Optional[SyntheticModel] = None) -> np.ndarray:
    """Exact covariance L Sigma_H L^T + noise_var I of the observed variables."""
    model = model or SyntheticModel()
    loadings = model.factor_loadings()
    cov = loadings @ model.factor_covariance() @ loadings.T + model.noise_var * np.eye(model.p)
    return (cov + cov.T) / 2.0


def synthetic_samples(n: int, seed: int = 0, model: Optional[SyntheticModel] = None) -> np.ndarray:
    """Draw n samples (rows) of the observed variables."""
    if n < 1:
        raise ArgumentError(f"sample count n={n} must be positive", flag="--n", domain=">= 1")
    model = model or SyntheticModel()
    rng = np.random.default_rng(seed)
    a, b = model.mix
    h1 = rng.normal(0.0, np.sqrt(model.var_h1), n)
    h2 = rng.normal(0.0, np.sqrt(model.var_h2), n)
    h3 = a * h1 + b * h2 + rng.normal(0.0, np.sqrt(model.noise_var), n)
    factors = np.column_stack([h1, h2, h3])
    noise = rng.normal(0.0, np.sqrt(model.noise_var), (n, model.p))
    return factors[:, list(model.groups)] + noise
