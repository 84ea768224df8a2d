"""Theoretical sparsity, deviation, orthogonality and explained-variance bounds.

All functions are closed-form in (lambda, p, r, theta); the verifiers in
`spcart.bounds.verify` compare them with what a run produced. Endpoint
strictness is kept on the returned `Interval` even though checks use slack.
"""

import math

from pydantic import BaseModel

from spcart.core.errors import ArgumentError
from spcart.models.config import TruncationKind, TruncationSpec
from spcart.models.report import Interval

# matches the slack T-en uses when accumulating energy shares
ENERGY_RTOL = 1e-12


class TruncationBounds(BaseModel):
    sparsity: Interval
    deviation: Interval


def _check_angle(theta: float) -> float:
    if not 0.0 <= theta <= math.pi / 2 + 1e-12:
        raise ArgumentError(f"angle {theta} outside [0, pi/2]")
    return theta


def _check_p(p: int) -> int:
    if p < 1:
        raise ArgumentError(f"dimension p={p} must be positive")
    return p


def nonortho_bound(theta1: float, theta2: float) -> float:
    """Upper bound on |cos(X_i, X_j)| given both deviation angles."""
    total = _check_angle(theta1) + _check_angle(theta2)
    return math.sin(total) if total <= math.pi / 2 else 1.0


def tl0_bounds(lam: float, p: int) -> TruncationBounds:
    _check_p(p)
    if lam < 1.0 / math.sqrt(p):
        return TruncationBounds(
            sparsity=Interval(lo=0.0, hi=1.0 - 1.0 / p),
            deviation=Interval(lo=0.0, hi=math.sqrt(p - 1) * lam),
        )
    return TruncationBounds(
        sparsity=Interval(lo=1.0 - 1.0 / (p * lam * lam), hi=1.0, lo_open=True),
        deviation=Interval(lo=0.0, hi=1.0),
    )


def tl1_bounds(lam: float, p: int) -> TruncationBounds:
    """Sparsity as T-l0; no absolute deviation cap beyond 1 is known."""
    return TruncationBounds(sparsity=tl0_bounds(lam, p).sparsity, deviation=Interval(lo=0.0, hi=1.0))


def tl1_deviation_bounds(truncated_energy: float, lam: float, cardinality: int) -> Interval:
    """Relative T-l1 deviation interval [||z_bar||, sqrt(||z_bar||^2 + lambda^2 ||x||_0))."""
    return Interval(
        lo=math.sqrt(truncated_energy),
        hi=math.sqrt(truncated_energy + lam * lam * cardinality),
        hi_open=True,
    )


def tsp_bounds(lam: int, p: int) -> TruncationBounds:
    _check_p(p)
    return TruncationBounds(
        sparsity=Interval(lo=lam / p, hi=1.0, hi_open=True),
        deviation=Interval(lo=0.0, hi=math.sqrt(lam / p)),
    )


def ten_bounds(lam: float, p: int) -> TruncationBounds:
    _check_p(p)
    zeroed = math.floor(lam * p * (1.0 + ENERGY_RTOL))
    return TruncationBounds(
        sparsity=Interval(lo=zeroed / p, hi=1.0 - 1.0 / p),
        deviation=Interval(lo=0.0, hi=math.sqrt(lam)),
    )


def truncation_bounds(spec: TruncationSpec, p: int) -> TruncationBounds:
    """Absolute bounds for whichever truncation type `spec` names."""
    if spec.kind is TruncationKind.HARD:
        return tl0_bounds(spec.lam, p)
    if spec.kind is TruncationKind.SOFT:
        return tl1_bounds(spec.lam, p)
    if spec.kind is TruncationKind.SPARSITY:
        return tsp_bounds(spec.count, p)
    return ten_bounds(spec.lam, p)


def ev_cos_bound(theta: float, r: int, ev_v: float) -> float:
    """(cos^2 theta - sqrt(r-1) sin 2theta) * EV(V); negative values are vacuous."""
    _check_angle(theta)
    if r < 1:
        raise ArgumentError(f"r={r} must be positive", flag="--r", domain=">= 1")
    return (math.cos(theta) ** 2 - math.sqrt(r - 1) * math.sin(2.0 * theta)) * ev_v


def coarse_ten_guarantee(lam: float, ev_v: float) -> float:
    """Rule of thumb for small-lambda T-en: about (1 - lambda) EV(V) is kept."""
    return (1.0 - lam) * ev_v
