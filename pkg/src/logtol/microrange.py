"""Binomial confidence intervals behind the small-sample warnings.

All three intervals accept an optional document size ``population`` and then
apply the finite-population factor ``sqrt((N-n)/(N-1))`` to the half-width.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InputError
from .scorecard import MICRO_RANGE_WORDS

DEFAULT_Z = 1.96


class IntervalMethod(str, enum.Enum):
    WALD = "wald"
    WILSON = "wilson"
    AGRESTI_COULL = "agresti_coull"


@dataclass(frozen=True)
class ProportionInterval:
    p_hat: float
    lower: float
    upper: float
    method: IntervalMethod
    z: float = DEFAULT_Z
    fpc: float | None = None
    center: float | None = None  # shifted centre for Wilson / Agresti-Coull

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.upper - self.lower)


@dataclass(frozen=True)
class MicroRangeAdvisory:
    expected_count: float
    relative_uncertainty: float
    escalated: bool
    advisory_text: str


def _check_counts(x: int, n: int, z: float, population: int | None) -> None:
    if int(x) != x or int(n) != n:
        raise InputError(f"counts must be integers, got x={x!r}, n={n!r}")
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    if not 0 <= x <= n:
        raise InputError(f"need 0 <= x <= n, got x={x}, n={n}")
    if not z > 0:
        raise InputError(f"z must be positive, got {z!r}")
    if population is not None and population < n:
        raise InputError(f"population N={population} is smaller than the sample n={n}")


def finite_population_factor(n: int, population: int | None) -> float:
    """``sqrt((N-n)/(N-1))``, or 1 when no population is given."""
    if population is None:
        return 1.0
    if population <= 1:
        return 0.0
    return math.sqrt((population - n) / (population - 1))


def _clamped(lo: float, hi: float) -> tuple[float, float]:
    return max(0.0, lo), min(1.0, hi)


def wald_interval(
    x: int, n: int, z: float = DEFAULT_Z, population: int | None = None
) -> ProportionInterval:
    """``p +/- z*sqrt(p(1-p)/n)``; collapses to a point at ``x = 0`` or ``x = n``."""
    _check_counts(x, n, z, population)
    p = x / n
    fpc = finite_population_factor(n, population)
    half = z * math.sqrt(p * (1.0 - p) / n) * fpc
    lo, hi = _clamped(p - half, p + half)
    fpc_field = fpc if population is not None else None
    return ProportionInterval(p, lo, hi, IntervalMethod.WALD, z, fpc_field, p)


def wilson_bounds(x: int, n: int, z: float = DEFAULT_Z, fpc: float = 1.0) -> tuple[float, float, float]:
    """Unclamped Wilson score ``(center, lower, upper)``."""
    p = x / n
    z2n = z * z / n
    denom = 1.0 + z2n
    center = (p + z2n / 2.0) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom * fpc
    return center, center - half, center + half


def wilson_interval(
    x: int, n: int, z: float = DEFAULT_Z, population: int | None = None
) -> ProportionInterval:
    _check_counts(x, n, z, population)
    fpc = finite_population_factor(n, population)
    center, lo, hi = wilson_bounds(x, n, z, fpc)
    lo, hi = _clamped(lo, hi)
    fpc_field = fpc if population is not None else None
    return ProportionInterval(x / n, lo, hi, IntervalMethod.WILSON, z, fpc_field, center)


def agresti_coull_interval(
    x: int, n: int, z: float = DEFAULT_Z, population: int | None = None
) -> ProportionInterval:
    """Adjusted Wald interval around ``(x + z^2/2) / (n + z^2)``.

    With ``z = 2`` this is the plus-four rule ``(x+2)/(n+4)``.
    """
    _check_counts(x, n, z, population)
    fpc = finite_population_factor(n, population)
    n_t = n + z * z
    p_t = (x + z * z / 2.0) / n_t
    half = z * math.sqrt(p_t * (1.0 - p_t) / n_t) * fpc
    lo, hi = _clamped(p_t - half, p_t + half)
    fpc_field = fpc if population is not None else None
    return ProportionInterval(x / n, lo, hi, IntervalMethod.AGRESTI_COULL, z, fpc_field, p_t)


def micro_range_advisory(ewc: float, rate_per_1000: float) -> MicroRangeAdvisory:
    """How noisy is an error count from ``ewc`` words at a given error rate?

    The expected count is ``ewc*rate/1000`` and its relative standard
    deviation about ``1/sqrt(count)``. Escalates below 250 words or when at
    most one error is expected.
    """
    if not ewc > 0 or not rate_per_1000 > 0:
        raise InputError("ewc and rate_per_1000 must be positive")
    expected = ewc * rate_per_1000 / 1000.0
    rel = 1.0 / math.sqrt(expected)
    reasons = []
    if ewc < MICRO_RANGE_WORDS:
        reasons.append(f"sample of {ewc:g} words is below the {MICRO_RANGE_WORDS}-word micro-range limit")
    if expected <= 1.0:
        reasons.append(f"only {expected:.3g} errors expected")
    escalated = bool(reasons)
    if escalated:
        text = (
            "WARNING: " + "; ".join(reasons) + f". Relative uncertainty of the error count is "
            f"~{rel:.0%}; deterministic tolerance curves are unreliable here, use "
            "statistical quality control (acceptance sampling) instead."
        )
    else:
        text = (
            f"{expected:.3g} errors expected; relative uncertainty of the count ~{rel:.0%}."
        )
    return MicroRangeAdvisory(expected, rel, escalated, text)
