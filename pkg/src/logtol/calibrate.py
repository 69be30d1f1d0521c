"""Calibrating a :class:`LogModel` from tolerance points.

Two routes are provided:

* exact two-point anchoring, a 1-D root find for ``b`` by geometric bracket
  growth followed by bisection, then ``a = e0 / ln(1 + b*x0)``;
* profiled (optionally weighted) least squares for any ``n >= 2``: for a
  fixed ``b`` the best ``a`` is closed-form, leaving a 1-D objective ``S(b)``
  that is minimised by bracketing plus golden-section search.

Uncertainty comes from the Gauss-Newton covariance ``sigma2 * pinv(J^T J)``
pushed through the delta method, or from a seeded nonparametric bootstrap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diagnostics import FitReport, fit_statistics
from .errors import CalibrationError, DegenerateDataError, InputError, NumericError
from .model import WORDS, LogModel, SizeUnit, TolerancePoint, tolerance

DEFAULT_TOL = 1e-8

# two-point bracket/bisection constants
B_LO = 1e-12
B_HI_START = 1e-6
GROWTH = 2.0
MAX_DOUBLINGS = 80
MAX_BISECTIONS = 120
F_ATOL = 1e-12

MAX_BRACKET_STEPS = 80
MAX_GOLDEN_ITER = 500
MULTISTART_COUNT = 8
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FeasibilityReport:
    """Whether two points can be joined by a curve with a, b > 0.

    ``r = e1/e0`` must lie strictly between 1 and ``rho = x1/x0``.
    """

    r: float
    rho: float
    feasible: bool

    @property
    def bounds(self) -> tuple[float, float]:
        return min(1.0, self.rho), max(1.0, self.rho)

    def describe(self) -> str:
        lo, hi = self.bounds
        verdict = "feasible" if self.feasible else "infeasible"
        return (
            f"{verdict}: need min{{1,rho}} < r < max{{1,rho}}, "
            f"i.e. {lo:.6g} < {self.r:.6g} < {hi:.6g} (rho={self.rho:.6g})"
        )


@dataclass(frozen=True)
class PredictionBand:
    xs: tuple[float, ...]
    center: tuple[float, ...]
    halfwidth: tuple[float, ...]
    degenerate: bool = False


def check_feasibility(p0: TolerancePoint, p1: TolerancePoint) -> FeasibilityReport:
    if p0.x == p1.x:
        raise DegenerateDataError(f"two-point calibration needs distinct sizes, both are {p0.x:g}")
    r = p1.e / p0.e
    rho = p1.x / p0.x
    feasible = min(1.0, rho) < r < max(1.0, rho)
    return FeasibilityReport(r, rho, feasible)


def _curvature_equation(p0: TolerancePoint, p1: TolerancePoint) -> Callable[[float], float]:
    r = p1.e / p0.e

    def f(b: float) -> float:
        return math.log1p(b * p1.x) - r * math.log1p(b * p0.x)

    return f


def _bracket_curvature(f: Callable[[float], float]) -> tuple[float, float, float]:
    """Grow ``b_hi`` geometrically until ``f`` changes sign on ``[B_LO, b_hi]``.

    Returns ``(b_lo, b_hi, f(b_lo))``; raises :class:`NumericError` if no sign
    change is found within ``MAX_DOUBLINGS`` doublings.
    """
    f_lo = f(B_LO)
    b_hi = B_HI_START
    for _ in range(MAX_DOUBLINGS):
        if f_lo * f(b_hi) < 0:
            return B_LO, b_hi, f_lo
        b_hi *= GROWTH
    raise NumericError(
        "could not bracket a root for b; check inputs",
        b_lo=B_LO,
        b_hi=b_hi,
        f_lo=f_lo,
        f_hi=f(b_hi),
    )


def _bisect(f: Callable[[float], float], lo: float, hi: float, f_lo: float, tol: float) -> float:
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) < F_ATOL:
            return mid
        if f_lo * f_mid < 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)


def calibrate_two_point(
    p0: TolerancePoint,
    p1: TolerancePoint,
    tol: float = DEFAULT_TOL,
    unit: SizeUnit = WORDS,
) -> LogModel:
    """Curve through two tolerance points, ``p0`` being the primary anchor.

    ``p0`` is reproduced exactly (up to rounding) because ``a`` is solved from
    it; ``p1`` is matched to the bisection tolerance ``tol`` (relative width
    of the final ``b`` bracket).

    Raises:
        CalibrationError: the pair is infeasible; ``.report`` holds the
            :class:`FeasibilityReport`.
        NumericError: the root could not be bracketed.
    """
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol!r}")
    report = check_feasibility(p0, p1)
    if not report.feasible:
        raise CalibrationError(f"no calibration with a>0, b>0 exists ({report.describe()})", report)
    f = _curvature_equation(p0, p1)
    lo, hi, f_lo = _bracket_curvature(f)
    b = _bisect(f, lo, hi, f_lo, tol)
    return LogModel(p0.e / math.log1p(b * p0.x), b, unit)


# ---------------------------------------------------------------------------
# profiled least squares


class _Profile:
    """Profiled objective over ``b`` for fixed (weighted) data."""

    def __init__(self, points: Sequence[TolerancePoint]) -> None:
        self.xs = [p.x for p in points]
        self.es = [p.e for p in points]
        self.ws = [p.w for p in points]
        self.evaluations = 0

    def logs(self, b: float) -> list[float]:
        return [math.log1p(b * x) for x in self.xs]

    def a_of_b(self, b: float) -> float:
        ls = self.logs(b)
        num = sum(w * e * l for w, e, l in zip(self.ws, self.es, ls))
        den = sum(w * l * l for w, l in zip(self.ws, ls))
        return num / den

    def __call__(self, b: float) -> float:
        self.evaluations += 1
        if not (b > 0 and math.isfinite(b)):
            return math.inf
        ls = self.logs(b)
        den = sum(w * l * l for w, l in zip(self.ws, ls))
        if not den > 0 or not math.isfinite(den):
            return math.inf
        a = sum(w * e * l for w, e, l in zip(self.ws, self.es, ls)) / den
        # residual form, not S0 - S1^2/S2, so exact fits keep precision
        return sum(w * (e - a * l) ** 2 for w, e, l in zip(self.ws, self.es, ls))


class _NotUnimodal(Exception):
    pass


def _bracket_minimum(
    q: Callable[[float], float], b0: float, grow: float = GROWTH, strict_unimodal: bool = True
) -> tuple[float, float, float]:
    b_l, b_c, b_r = b0 / grow, b0, b0 * grow
    f_l, f_c, f_r = q(b_l), q(b_c), q(b_r)
    steps = 0
    while not (f_c <= f_l and f_c <= f_r):
        if f_c > f_l and f_c > f_r and strict_unimodal:
            raise _NotUnimodal(b_c)
        if steps >= MAX_BRACKET_STEPS:
            raise NumericError(
                "could not bracket a minimum for b; check data",
                bracket=(b_l, b_c, b_r),
                values=(f_l, f_c, f_r),
                steps=steps,
            )
        steps += 1
        if f_l < f_r:
            b_r, f_r = b_c, f_c
            b_c, f_c = b_l, f_l
            b_l /= grow
            f_l = q(b_l)
        else:
            b_l, f_l = b_c, f_c
            b_c, f_c = b_r, f_r
            b_r *= grow
            f_r = q(b_r)
    return b_l, b_c, b_r


def _golden(q: Callable[[float], float], left: float, right: float, tol: float) -> float:
    x1 = right - _INVPHI * (right - left)
    x2 = left + _INVPHI * (right - left)
    f1, f2 = q(x1), q(x2)
    for _ in range(MAX_GOLDEN_ITER):
        if right - left <= tol * (abs(left) + abs(right)):
            break
        if f1 > f2:
            left = x1
            x1, f1 = x2, f2
            x2 = left + _INVPHI * (right - left)
            f2 = q(x2)
        else:
            right = x2
            x2, f2 = x1, f1
            x1 = right - _INVPHI * (right - left)
            f1 = q(x1)
    return 0.5 * (left + right)


def _minimise(q: _Profile, b0: float, tol: float) -> tuple[float, tuple[float, float], bool]:
    try:
        b_l, b_c, b_r = _bracket_minimum(q, b0)
        return _golden(q, b_l, b_r, tol), (b_l, b_r), False
    except _NotUnimodal:
        pass

    best: tuple[float, float, tuple[float, float]] | None = None
    last_error: NumericError | None = None
    for start in np.geomspace(b0 * 1e-3, b0 * 1e3, MULTISTART_COUNT):
        try:
            b_l, b_c, b_r = _bracket_minimum(q, float(start), strict_unimodal=False)
        except NumericError as exc:
            last_error = exc
            continue
        b = _golden(q, b_l, b_r, tol)
        s = q(b)
        if best is None or s < best[0]:
            best = (s, b, (b_l, b_r))
    if best is None:
        assert last_error is not None
        raise last_error
    return best[1], best[2], True


def fit_least_squares(
    points: Sequence[TolerancePoint],
    b0: float | None = None,
    tol: float = DEFAULT_TOL,
    unit: SizeUnit = WORDS,
) -> FitReport:
    """Least-squares fit of ``a*ln(1+b*x)`` to two or more points.

    Args:
        points: Tolerance points; their weights enter every sum.
        b0: Starting curvature; defaults to ``1/(10*max x)``.
        tol: Relative width at which golden-section search stops.
        unit: Unit the point sizes are expressed in.

    Raises:
        DegenerateDataError: fewer than two distinct sizes.
        NumericError: no minimum could be bracketed.
    """
    points = list(points)
    if len(points) < 2:
        raise InputError(f"least squares needs at least 2 points, got {len(points)}")
    if len({p.x for p in points}) < 2:
        raise DegenerateDataError("all points share the same size; curvature is not identifiable")
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol!r}")
    x_max = max(p.x for p in points)
    if b0 is None:
        b0 = 1.0 / (10.0 * x_max)
    elif not (b0 > 0 and math.isfinite(b0)):
        raise InputError(f"b0 must be positive, got {b0!r}")

    q = _Profile(points)
    b_hat, bracket, multistart = _minimise(q, b0, tol)
    a_hat = q.a_of_b(b_hat)
    if not (a_hat > 0 and math.isfinite(a_hat)):
        raise NumericError("fit produced a non-positive scale a", a=a_hat, b=b_hat)
    model = LogModel(a_hat, b_hat, unit)
    return _report(model, points, bracket=bracket, multistart=multistart)


def _report(
    model: LogModel,
    points: Sequence[TolerancePoint],
    bracket: tuple[float, float] | None = None,
    multistart: bool = False,
) -> FitReport:
    x = np.array([p.x for p in points])
    e = np.array([p.e for p in points])
    w = np.array([p.w for p in points])
    a, b = model.a, model.b
    logs = np.log1p(b * x)
    fitted = a * logs
    stats = fit_statistics(e, fitted, k=2, weights=w)
    n = len(points)
    sigma2 = stats.sse / max(n - 2, 1)

    sw = np.sqrt(w)
    jac = np.column_stack([-logs, -a * x / (1.0 + b * x)]) * sw[:, None]
    jtj = jac.T @ jac
    rank = int(np.linalg.matrix_rank(jtj))
    covariance = sigma2 * np.linalg.pinv(jtj)
    covariance = 0.5 * (covariance + covariance.T)
    covariance.setflags(write=False)

    notes = []
    if n <= 2:
        notes.append("degenerate (zero residual dof)")
    if rank < 2:
        notes.append("J^T J is rank deficient; covariance uses the pseudo-inverse")
    if multistart:
        notes.append("non-unimodal objective detected; multi-start search used")
    return FitReport(
        model=model,
        sse=stats.sse,
        rmse=stats.rmse,
        r_squared=stats.r_squared,
        aic=stats.aic,
        bic=stats.bic,
        residuals=tuple(float(r) for r in e - fitted),
        sigma2=sigma2,
        covariance=covariance,
        n=n,
        k=2,
        weights=tuple(float(v) for v in w),
        degenerate=n <= 2,
        rank_deficient=rank < 2,
        multistart=multistart,
        bracket=bracket,
        notes=tuple(notes),
    )


def profiled_objective(points: Sequence[TolerancePoint], b: float) -> float:
    """``S(b)``: weighted SSE with ``a`` profiled out."""
    return _Profile(points)(b)


def profiled_objective_derivative(points: Sequence[TolerancePoint], b: float) -> float:
    """Analytic ``dS/db`` of the profiled objective.

    Not used by the solver; a near-zero value at the fitted ``b`` is a cheap
    convergence check.
    """
    s1 = s2 = ds1 = ds2 = 0.0
    for p in points:
        l = math.log1p(b * p.x)
        dl = p.x / (1.0 + b * p.x)
        s1 += p.w * p.e * l
        s2 += p.w * l * l
        ds1 += p.w * p.e * dl
        ds2 += 2.0 * p.w * l * dl
    return -(2.0 * s1 * ds1 * s2 - s1 * s1 * ds2) / (s2 * s2)


# ---------------------------------------------------------------------------
# uncertainty bands


def prediction_band(report: FitReport, xs: Sequence[float], multiplier: float = 1.0) -> PredictionBand:
    """Delta-method band: ``multiplier`` standard errors of the fitted curve."""
    model = report.model
    if not isinstance(model, LogModel):
        raise InputError("prediction_band needs a logarithmic fit")
    cov = np.asarray(report.covariance, dtype=float)
    if cov.shape != (2, 2) or not np.all(np.isfinite(cov)):
        raise NumericError("covariance is not a finite 2x2 matrix", covariance=cov)
    if not multiplier >= 0:
        raise InputError(f"multiplier must be nonnegative, got {multiplier!r}")
    xs_arr = np.asarray(xs, dtype=float)
    if np.any(xs_arr < 0):
        raise InputError("band sizes must be nonnegative")
    grad = np.column_stack([np.log1p(model.b * xs_arr), model.a * xs_arr / (1.0 + model.b * xs_arr)])
    var = np.einsum("ij,jk,ik->i", grad, cov, grad)
    half = multiplier * np.sqrt(np.clip(var, 0.0, None))
    return PredictionBand(
        xs=tuple(float(v) for v in xs_arr),
        center=tuple(tolerance(model, float(v)) for v in xs_arr),
        halfwidth=tuple(float(v) for v in half),
        degenerate=report.n < 3,
    )


def bootstrap_band(
    points: Sequence[TolerancePoint],
    xs: Sequence[float],
    resamples: int = 1000,
    seed: int = 0,
    unit: SizeUnit = WORDS,
    multiplier: float = 1.0,
    max_failures: int | None = None,
    tol: float = DEFAULT_TOL,
) -> PredictionBand:
    """Nonparametric bootstrap band over the elicited points.

    Each resample draws ``n`` points with replacement and refits. Draws whose
    fit fails (for instance a single distinct size) are redrawn; after
    ``max_failures`` failed draws (default: ``resamples``) the call gives up.
    The centre is the fit to the full data; the half-width is ``multiplier``
    times the sample standard deviation of the refitted curves.
    """
    points = list(points)
    n = len(points)
    if n < 3:
        raise InputError(f"bootstrap needs at least 3 points, got {n}")
    if resamples < 100:
        raise InputError(f"bootstrap needs at least 100 resamples, got {resamples}")
    budget = resamples if max_failures is None else max_failures
    xs_arr = np.asarray(xs, dtype=float)

    base = fit_least_squares(points, tol=tol, unit=unit).model
    rng = np.random.default_rng(seed)
    draws = np.empty((resamples, xs_arr.size))
    failures = 0
    done = 0
    while done < resamples:
        idx = rng.integers(0, n, size=n)
        try:
            model = fit_least_squares([points[i] for i in idx], tol=tol, unit=unit).model
        except (DegenerateDataError, NumericError):
            failures += 1
            if failures > budget:
                rate = failures / (failures + done)
                raise NumericError(
                    f"bootstrap retry budget exhausted: {failures} failed fits "
                    f"({rate:.1%} failure rate)",
                    failures=failures,
                    successes=done,
                ) from None
            continue
        draws[done] = model.a * np.log1p(model.b * xs_arr)
        done += 1

    half = multiplier * draws.std(axis=0, ddof=1)
    return PredictionBand(
        xs=tuple(float(v) for v in xs_arr),
        center=tuple(tolerance(base, float(v)) for v in xs_arr),
        halfwidth=tuple(float(v) for v in half),
    )
