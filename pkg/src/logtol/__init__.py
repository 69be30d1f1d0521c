"""Logarithmic tolerance curves for translation-quality scoring.

Fit ``E(x) = a*ln(1 + b*x)`` from elicited tolerance points, turn penalty
totals into calibrated 0-100 scores with Pass/Fail verdicts, and measure how
far an anchored linear rule can be trusted.
"""

from .calibrate import (
    FeasibilityReport,
    PredictionBand,
    bootstrap_band,
    calibrate_two_point,
    check_feasibility,
    fit_least_squares,
    prediction_band,
)
from .diagnostics import (
    FitReport,
    FitStatistics,
    ModelComparison,
    compare_models,
    fit_linear_through_origin,
    fit_statistics,
)
from .errors import CalibrationError, DegenerateDataError, DomainError, InputError, LogTolError, NumericError
from .fidelity import FidelityInterval, fidelity_interval, lambert_w_minus1, linear_log_ratio
from .microrange import (
    ProportionInterval,
    agresti_coull_interval,
    micro_range_advisory,
    wald_interval,
    wilson_interval,
)
from .model import (
    LinearModel,
    LogModel,
    SizeUnit,
    TolerancePoint,
    convert_unit,
    linearize_at,
    retarget,
    tolerance,
)
from .scorecard import Evaluation, Scorecard, ScoreScale, Verdict, raw_score, raw_threshold_check, score

__version__ = "0.1.0"
