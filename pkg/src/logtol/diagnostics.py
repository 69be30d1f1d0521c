"""Goodness-of-fit statistics and the log-vs-linear model comparison.

AIC and BIC use the reduced least-squares form ``n*ln(SSE/n) + penalty``
without the Gaussian likelihood constant, and R^2 is always taken against the
mean-centred total sum of squares, including for the through-origin line. A
through-origin fit can therefore have a negative R^2; it is not clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DegenerateDataError, InputError
from .model import WORDS, LinearModel, LogModel, SizeUnit, TolerancePoint


@dataclass(frozen=True)
class FitStatistics:
    sse: float
    rmse: float
    r_squared: float | None  # None when the observations have no spread
    aic: float  # -inf when sse == 0
    bic: float
    n: int
    k: int


@dataclass(frozen=True)
class FitReport:
    """A fitted tolerance model together with its diagnostics.

    ``residuals`` are raw (``e_i - fitted_i``); with weights the statistics use
    ``sum(w_i * r_i**2)``. ``covariance`` is over ``(a, b)`` for the log model
    and over ``(c,)`` for the linear one.
    """

    model: LogModel | LinearModel
    sse: float
    rmse: float
    r_squared: float | None
    aic: float
    bic: float
    residuals: tuple[float, ...]
    sigma2: float
    covariance: np.ndarray
    n: int
    k: int
    weights: tuple[float, ...] = ()
    degenerate: bool = False  # zero residual degrees of freedom
    rank_deficient: bool = False
    multistart: bool = False
    bracket: tuple[float, float] | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def statistics(self) -> FitStatistics:
        return FitStatistics(self.sse, self.rmse, self.r_squared, self.aic, self.bic, self.n, self.k)


@dataclass(frozen=True)
class ModelComparison:
    log_fit: FitReport
    linear_fit: FitReport
    delta_aic: float  # linear - log; positive favours log
    delta_bic: float
    preferred: Literal["log", "linear"]


def fit_statistics(
    observed: Sequence[float],
    predicted: Sequence[float],
    k: int,
    weights: Sequence[float] | None = None,
) -> FitStatistics:
    """SSE, RMSE, R^2, AIC and BIC of ``predicted`` against ``observed``.

    Args:
        observed: Observed tolerances ``y_i``.
        predicted: Model values at the same sizes.
        k: Number of fitted parameters (enters AIC/BIC only).
        weights: Optional positive weights; SSE and the total sum of squares
            are then weighted and the mean is the weighted mean.

    Returns:
        A :class:`FitStatistics`. ``r_squared`` is ``None`` when all observed
        values are equal; ``aic``/``bic`` are ``-inf`` for a perfect fit.
    """
    y = np.asarray(observed, dtype=float)
    yhat = np.asarray(predicted, dtype=float)
    if y.shape != yhat.shape or y.ndim != 1:
        raise InputError("observed and predicted must be 1-D sequences of equal length")
    n = y.size
    if n < 1:
        raise InputError("at least one observation is required")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != y.shape or np.any(w <= 0):
        raise InputError("weights must be positive and match the observations")

    sse = float(np.sum(w * (y - yhat) ** 2))
    rmse = math.sqrt(sse / n)
    ybar = float(np.sum(w * y) / np.sum(w))
    sst = float(np.sum(w * (y - ybar) ** 2))
    r_squared = None if sst == 0 else 1.0 - sse / sst
    if sse > 0:
        base = n * math.log(sse / n)
        aic = base + 2 * k
        bic = base + k * math.log(n)
    else:
        aic = bic = -math.inf
    return FitStatistics(sse, rmse, r_squared, aic, bic, n, k)


def fit_linear_through_origin(
    points: Sequence[TolerancePoint], unit: SizeUnit = WORDS
) -> FitReport:
    """Weighted least-squares line ``e = c*x`` through the origin."""
    if len(points) < 1:
        raise InputError("at least one point is required")
    x = np.array([p.x for p in points])
    e = np.array([p.e for p in points])
    w = np.array([p.w for p in points])
    sxx = float(np.sum(w * x * x))
    if sxx == 0:
        raise DegenerateDataError("all sizes are zero; slope is undefined")
    c = float(np.sum(w * x * e)) / sxx
    fitted = c * x
    stats = fit_statistics(e, fitted, k=1, weights=w)
    n = len(points)
    sigma2 = stats.sse / max(n - 1, 1)
    return FitReport(
        model=LinearModel(c, unit),
        sse=stats.sse,
        rmse=stats.rmse,
        r_squared=stats.r_squared,
        aic=stats.aic,
        bic=stats.bic,
        residuals=tuple(float(r) for r in e - fitted),
        sigma2=sigma2,
        covariance=np.array([[sigma2 / sxx]]),
        n=n,
        k=1,
        weights=tuple(float(v) for v in w),
        degenerate=n < 2,
    )


def compare_models(points: Sequence[TolerancePoint], unit: SizeUnit = WORDS) -> ModelComparison:
    """Fit both curves to the same points and rank them by AIC.

    Ties go to the linear rule, the simpler model.
    """
    from .calibrate import fit_least_squares

    if len(points) < 3:
        raise InputError(f"model comparison needs at least 3 points, got {len(points)}")
    log_fit = fit_least_squares(points, unit=unit)
    linear_fit = fit_linear_through_origin(points, unit=unit)
    delta_aic = linear_fit.aic - log_fit.aic
    delta_bic = linear_fit.bic - log_fit.bic
    if math.isnan(delta_aic):
        # both fits exact (-inf - -inf): fall back to the simpler model
        delta_aic = 0.0
    if math.isnan(delta_bic):
        delta_bic = 0.0
    preferred: Literal["log", "linear"] = "log" if delta_aic > 0 else "linear"
    return ModelComparison(log_fit, linear_fit, delta_aic, delta_bic, preferred)
