"""Result models: fit reports, metrics, bound checks and CLI records."""

import math
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from spcart.models.config import TruncationSpec

BOUND_SLACK = 1e-9


class IterationRecord(BaseModel):
    """One iteration of a solver."""
    iteration: int = Field(..., ge=1)
    component: Optional[int] = Field(None, description="Loading index for deflation solvers")
    rel_change: float = Field(..., description="||X(t) - X(t-1)||_F / sqrt(r), sign aligned")
    truncated_energy_mean: float
    sp: float = Field(..., description="Mean sparsity of the iterate")
    objective: Optional[float] = None
    cpev: Optional[float] = None
    nor: Optional[float] = None


class MetricsSnapshot(BaseModel):
    """Evaluation criteria of a loading matrix."""
    sp_mean: float = Field(..., ge=0.0, le=1.0)
    sp_std: float = Field(..., ge=0.0)
    sp_worst: float = Field(..., ge=0.0, le=1.0)
    nor: float = Field(..., ge=0.0)
    ev: float = Field(..., ge=0.0)
    ev_ratio: float = Field(..., ge=0.0, description="EV / tr(A^T A)")
    cpev: float = Field(..., ge=0.0, le=1.0 + 1e-10)
    nz: int = Field(..., ge=0, description="Total cardinality")
    per_column_sparsity: List[float]
    per_column_cardinality: List[int]


class Interval(BaseModel):
    """Closed or half-open interval; open ends are still checked with slack."""
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def contains(self, value: float, slack: float = BOUND_SLACK) -> bool:
        return self.lo - slack <= value <= self.hi + slack

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:.6g}, {self.hi:.6g}{right}"


class BoundReport(BaseModel):
    """A theoretical interval next to the value a run produced."""
    name: str
    theoretical: Interval
    empirical: Optional[float] = None
    satisfied: Optional[bool] = None
    applicable: bool = True
    vacuous: bool = False
    note: Optional[str] = None
    context: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def check(cls, name: str, theoretical: Interval, empirical: float, **kwargs: Any) -> "BoundReport":
        return cls(name=name, theoretical=theoretical, empirical=float(empirical),
                   satisfied=theoretical.contains(float(empirical)), **kwargs)

    @classmethod
    def skipped(cls, name: str, note: str, **kwargs: Any) -> "BoundReport":
        return cls(name=name, theoretical=Interval(lo=-math.inf, hi=math.inf),
                   applicable=False, note=note, **kwargs)


class ContainmentSummary(BaseModel):
    """Outcome of a Monte-Carlo bound verification."""
    name: str
    trials: int
    violations: int
    theoretical: Optional[Interval] = Field(None, description="Absent when the interval varies per trial")
    empirical_min: float
    empirical_max: float
    context: Dict[str, Any] = Field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.violations == 0


class FitReport(BaseModel):
    """Loadings and diagnostics returned by every solver."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: str
    truncation: Optional[TruncationSpec] = None
    loadings: np.ndarray
    rotation: Optional[np.ndarray] = Field(None, description="R with Z = V R^T (SPCArt only)")
    iterations: int = 0
    converged: bool = True
    objective: Optional[float] = None
    trace: List[IterationRecord] = Field(default_factory=list)
    iterates: List[np.ndarray] = Field(default_factory=list, exclude=True)
    final_metrics: MetricsSnapshot
    component_iterations: List[int] = Field(default_factory=list)
    zero_column_events: int = 0
    bound_checks: List[BoundReport] = Field(default_factory=list)

    @field_serializer("loadings", "rotation")
    def _arrays(self, value: Optional[np.ndarray]) -> Optional[List[List[float]]]:
        return None if value is None else value.tolist()


class RunRecord(BaseModel):
    """One metrics line for fit and compare outputs."""
    method: str
    truncation: Optional[str] = None
    lam: Optional[float] = None
    r: int
    sp: float
    std: float
    sp_worst: float
    nor: float
    ev: float
    cpev: float
    nz: int
    cardinalities: str = Field(..., description="Per-column cardinalities, e.g. 424332")
    iterations: int
    converged: bool
    wall_time: float = Field(..., description="Seconds; excluded from determinism checks")

    @classmethod
    def from_report(cls, report: FitReport, wall_time: float) -> "RunRecord":
        m = report.final_metrics
        spec = report.truncation
        return cls(
            method=report.method,
            truncation=spec.kind.value if spec else None,
            lam=spec.lam if spec else None,
            r=int(report.loadings.shape[1]),
            sp=m.sp_mean,
            std=m.sp_std,
            sp_worst=m.sp_worst,
            nor=m.nor,
            ev=m.ev,
            cpev=m.cpev,
            nz=m.nz,
            cardinalities="".join(str(c) if c < 10 else f"({c})" for c in m.per_column_cardinality),
            iterations=report.iterations,
            converged=report.converged,
            wall_time=wall_time,
        )


class ErrorRecord(BaseModel):
    """Structured error line written by the CLI."""
    error: str = Field(..., description="Error kind, e.g. 'argument'")
    message: str
    flag: Optional[str] = None
    domain: Optional[str] = None
    run_id: Optional[str] = None


class BoundRecord(BaseModel):
    """Flat line of a bound report file."""
    source: str = Field(..., description="'fit' for per-run checks, 'monte-carlo' for sampled checks")
    name: str
    interval: Optional[str] = None
    lo: Optional[float] = None
    hi: Optional[float] = None
    empirical: Optional[float] = None
    empirical_max: Optional[float] = None
    satisfied: Optional[bool] = None
    applicable: bool = True
    vacuous: bool = False
    trials: Optional[int] = None
    violations: Optional[int] = None
    note: Optional[str] = None
    context: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_report(cls, report: BoundReport) -> "BoundRecord":
        t = report.theoretical
        return cls(
            source="fit",
            name=report.name,
            interval=str(t) if report.applicable else None,
            lo=t.lo if report.applicable else None,
            hi=t.hi if report.applicable else None,
            empirical=report.empirical,
            satisfied=report.satisfied,
            applicable=report.applicable,
            vacuous=report.vacuous,
            note=report.note,
            context=report.context,
        )

    @classmethod
    def from_summary(cls, summary: ContainmentSummary) -> "BoundRecord":
        t = summary.theoretical
        return cls(
            source="monte-carlo",
            name=summary.name,
            interval=str(t) if t else None,
            lo=t.lo if t else None,
            hi=t.hi if t else None,
            empirical=summary.empirical_min,
            empirical_max=summary.empirical_max,
            satisfied=summary.satisfied,
            trials=summary.trials,
            violations=summary.violations,
            context=summary.context,
        )
