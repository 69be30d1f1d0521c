"""Where does a linear rule anchored at ``x_ref`` track the log curve?

The anchored rule is ``E_lin(x) = E(x_ref) * x / x_ref``. Its ratio to the
curve rises monotonically from ``alpha = ln(1+b*x_ref)/(b*x_ref)`` at ``x -> 0``
through 1 at ``x_ref``. Setting the ratio to ``k = 1 -/+ eps`` and substituting
``y = 1 + b*x`` gives ``y*exp(-alpha*y/k) = exp(-alpha/k)``. Besides the trivial
root ``y = 1`` it is solved by the lower real branch of the Lambert W function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InputError, NumericError
from .model import LogModel, tolerance

DEFAULT_EPSILON = 0.20
BRANCH_POINT = -math.exp(-1.0)

_MAX_HALLEY = 50
_RATIO_ATOL = 1e-6


def lambert_w_minus1(z: float) -> float:
    """Lower real branch ``W_{-1}(z)`` for ``-1/e <= z < 0``.

    The result satisfies ``w * exp(w) = z`` with ``w <= -1``. Seeds: the
    branch-point series in ``sqrt(2*(e*z + 1))`` near ``-1/e``, otherwise the
    asymptotic ``ln(-z) - ln(-ln(-z))``. Halley's iteration finishes the job.

    Raises:
        DomainError: ``z`` is outside ``[-1/e, 0)``.
    """
    z = float(z)
    if not (z < 0) or z < BRANCH_POINT:
        if math.isclose(z, BRANCH_POINT, rel_tol=0, abs_tol=1e-16):
            return -1.0
        raise DomainError(f"W_-1 is real only on [-1/e, 0), got z={z!r}")
    if z == BRANCH_POINT:
        return -1.0

    if z < -0.25:
        p = -math.sqrt(2.0 * (math.e * z + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    else:
        lz = math.log(-z)
        w = lz - math.log(-lz)

    for _ in range(_MAX_HALLEY):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w_new = w - dw
        if w_new > -1.0:
            # keep the iterate on the lower branch
            w_new = 0.5 * (w - 1.0)
        w = w_new
        if abs(dw) < 1e-13 * (1.0 + abs(w)):
            break
    return min(w, -1.0)


@dataclass(frozen=True)
class FidelityInterval:
    """Sizes around ``x_ref`` where ``|E_lin/E_log - 1| <= epsilon``."""

    x_ref: float
    epsilon: float
    x_lower: float
    x_upper: float
    alpha: float

    @property
    def x_lower_rounded(self) -> int:
        return round(self.x_lower)

    @property
    def x_upper_rounded(self) -> int:
        return round(self.x_upper)

    @property
    def width(self) -> float:
        return self.x_upper - self.x_lower

    @property
    def relative_offsets(self) -> tuple[float, float]:
        return self.x_lower / self.x_ref - 1.0, self.x_upper / self.x_ref - 1.0

    def contains(self, x: float) -> bool:
        return self.x_lower <= x <= self.x_upper


def linear_log_ratio(model: LogModel, x_ref: float, x: float) -> float:
    """``E_lin(x) / E_log(x)`` for the linear rule anchored at ``x_ref``."""
    if not (x_ref > 0 and x > 0):
        raise InputError(f"sizes must be positive, got x_ref={x_ref!r}, x={x!r}")
    if x == x_ref:
        return 1.0
    return tolerance(model, x_ref) * x / (x_ref * tolerance(model, x))


def _boundary(model: LogModel, alpha: float, k: float) -> float:
    t = alpha / k
    if not t < 1.0:
        raise NumericError(
            f"no boundary where the linear/log ratio equals {k:g}: alpha >= {k:g}, so the "
            "linear rule stays within the band all the way down to zero size",
            alpha=alpha,
            ratio=k,
        )
    arg = -t * math.exp(-t)
    try:
        w = lambert_w_minus1(arg)
    except DomainError as exc:
        raise NumericError(str(exc), alpha=alpha, ratio=k, argument=arg) from exc
    y = -w / t
    return (y - 1.0) / model.b


def fidelity_interval(
    model: LogModel, x_ref: float, epsilon: float = DEFAULT_EPSILON
) -> FidelityInterval:
    """Closed-form fidelity interval, checked by re-evaluating the ratio.

    Sizes are in ``model.unit``.

    Raises:
        NumericError: the lower boundary does not exist for this ``alpha``
            and ``epsilon``, or the post-hoc ratio check failed.
    """
    if not x_ref > 0:
        raise InputError(f"x_ref must be positive, got {x_ref!r}")
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    y_ref = model.b * x_ref
    alpha = math.log1p(y_ref) / y_ref
    lower = _boundary(model, alpha, 1.0 - epsilon)
    upper = _boundary(model, alpha, 1.0 + epsilon)

    for x, target in ((lower, 1.0 - epsilon), (upper, 1.0 + epsilon)):
        ratio = linear_log_ratio(model, x_ref, x) if x > 0 else math.nan
        if not abs(ratio - target) < _RATIO_ATOL:
            raise NumericError(
                f"boundary check failed: ratio {ratio!r} at x={x!r}, expected {target}",
                alpha=alpha,
                epsilon=epsilon,
            )
    if not lower < x_ref < upper:
        raise NumericError("boundaries do not straddle x_ref", lower=lower, upper=upper, x_ref=x_ref)
    return FidelityInterval(x_ref, epsilon, lower, upper, alpha)
