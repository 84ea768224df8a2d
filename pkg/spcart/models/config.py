"""Configuration models for solvers and CLI runs."""

import math
from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from spcart.core.errors import ArgumentError
from spcart.models.matrix import InputKind

SQRT_P_TOKEN = "1/sqrt(p)"


class TruncationKind(str, Enum):
    """Truncation types; values are the CLI tokens."""
    HARD = "l0"
    SOFT = "l1"
    SPARSITY = "sp"
    ENERGY = "en"

    @property
    def label(self) -> str:
        return {"l0": "T-l0", "l1": "T-l1", "sp": "T-sp", "en": "T-en"}[self.value]


class TruncationSpec(BaseModel):
    """Truncation type plus its parameter lambda."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: TruncationKind = Field(..., description="Truncation type")
    lam: float = Field(..., alias="lambda", ge=0.0, description="Truncation parameter")

    @model_validator(mode="after")
    def _check_domain(self) -> "TruncationSpec":
        if self.kind is TruncationKind.SPARSITY:
            if not float(self.lam).is_integer():
                raise ValueError(f"T-sp lambda must be an integer count, got {self.lam}")
        elif self.lam >= 1.0:
            raise ValueError(f"{self.kind.label} lambda must lie in [0, 1), got {self.lam}")
        return self

    @property
    def count(self) -> int:
        """Number of entries T-sp zeroes."""
        return int(self.lam)

    def validate_for(self, p: int) -> "TruncationSpec":
        """Check the p-dependent part of the domain (T-sp needs lambda <= p-1)."""
        if self.kind is TruncationKind.SPARSITY and self.count > p - 1:
            raise ArgumentError(f"T-sp lambda={self.count} zeroes too many of p={p} entries",
                                flag="--lambda", domain=f"integer in [0, {p - 1}]")
        return self

    def __str__(self) -> str:
        lam = str(self.count) if self.kind is TruncationKind.SPARSITY else f"{self.lam:.6g}"
        return f"{self.kind.label}({lam})"


def resolve_lambda(token: str, kind: TruncationKind, p: int) -> float:
    """Turn a CLI lambda token into a number once p is known."""
    token = token.strip()
    if token == SQRT_P_TOKEN:
        if kind not in (TruncationKind.HARD, TruncationKind.SOFT):
            raise ArgumentError(f"'{SQRT_P_TOKEN}' only applies to l0/l1 truncation",
                                flag="--lambda", domain="number")
        return 1.0 / math.sqrt(p)
    try:
        return float(token)
    except ValueError:
        raise ArgumentError(f"cannot parse lambda '{token}'", flag="--lambda",
                            domain=f"number or '{SQRT_P_TOKEN}'") from None


class SpcartConfig(BaseModel):
    """Settings for one SPCArt fit."""
    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=1, description="Number of loadings")
    truncation: TruncationSpec
    max_iterations: int = Field(200, ge=1)
    rel_change_tol: float = Field(0.01, gt=0.0)
    record_trace: bool = Field(False, description="Store iterates plus per-iteration CPEV/NOR")
    restarts: int = Field(0, ge=0, description="Extra runs from random rotations")
    seed: Optional[int] = Field(None, description="Seed for restart rotations")


class PowerMode(str, Enum):
    DEFLATION = "deflation"
    BLOCK = "block"


class PowerConfig(BaseModel):
    """Settings for rSVD-GP (deflation) and rSVD-GPB (block)."""
    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=1)
    truncation: TruncationSpec
    adaptive: bool = Field(True, description="Threshold z/||z|| instead of raw z")
    mode: PowerMode = PowerMode.DEFLATION
    max_iterations: int = Field(200, ge=1)
    rel_change_tol: float = Field(0.01, gt=0.0)
    record_trace: bool = False


class Command(str, Enum):
    FIT = "fit"
    COMPARE = "compare"
    BOUNDS = "bounds"
    SYNTH = "synth"


class Method(str, Enum):
    SPCART = "spcart"
    RSVD_GP = "rsvd-gp"
    RSVD_GPB = "rsvd-gpb"
    ST = "st"
    PCA = "pca"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"


class RunConfig(BaseModel):
    """One CLI invocation, after flags and config file are merged."""
    model_config = ConfigDict(frozen=True)

    command: Command
    input: str = Field("synthetic", description="Builtin id (pitprops, synthetic) or CSV path")
    input_kind: Optional[InputKind] = Field(None, description="How to read a CSV input")
    method: Method = Method.SPCART
    methods: List[Method] = Field(default_factory=list, description="Methods swept by compare")
    trunc: TruncationKind = TruncationKind.HARD
    lam: str = Field(SQRT_P_TOKEN, description="Lambda token")
    lambdas: List[str] = Field(default_factory=list, description="Lambda tokens swept by compare")
    r: int = Field(2, ge=1)
    adaptive: bool = True
    seed: int = 0
    restarts: int = Field(0, ge=0)
    max_iterations: int = Field(200, ge=1)
    tol: float = Field(0.01, gt=0.0)
    output: Optional[Path] = None
    fmt: OutputFormat = OutputFormat.CSV
    center: bool = True
    remove_dc: bool = False
    literal_artificial: bool = False
    trials: int = Field(0, ge=0, description="Monte-Carlo trials for bounds")
    n: int = Field(0, ge=0, description="Samples drawn by synth")
    workers: int = Field(1, ge=1)

    @field_validator("lam")
    @classmethod
    def _lambda_token(cls, v: str) -> str:
        return _check_token(v)

    @field_validator("lambdas")
    @classmethod
    def _lambda_tokens(cls, v: List[str]) -> List[str]:
        return [_check_token(t) for t in v]

    @model_validator(mode="after")
    def _check_lambda_kind(self) -> "RunConfig":
        # checks that do not need p, on the tokens this command will run
        tokens = [self.lam]
        if self.command is Command.COMPARE and self.lambdas:
            tokens = list(self.lambdas)
        for token in tokens:
            if token == SQRT_P_TOKEN:
                if self.trunc not in (TruncationKind.HARD, TruncationKind.SOFT):
                    raise ValueError(f"'{SQRT_P_TOKEN}' only applies to l0/l1 truncation")
                continue
            TruncationSpec(kind=self.trunc, lam=float(token))
        return self

    def truncation_for(self, token: str, p: int) -> TruncationSpec:
        spec = TruncationSpec(kind=self.trunc, lam=resolve_lambda(token, self.trunc, p))
        return spec.validate_for(p)


def _check_token(v: str) -> str:
    v = v.strip()
    if v == SQRT_P_TOKEN:
        return v
    try:
        value = float(v)
    except ValueError:
        raise ValueError(f"expected a number or '{SQRT_P_TOKEN}', got '{v}'") from None
    if not math.isfinite(value):
        raise ValueError(f"lambda must be finite, got '{v}'")
    return v
