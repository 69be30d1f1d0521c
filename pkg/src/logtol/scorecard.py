"""Calibrated 0-100 scores and Pass/Fail verdicts for single evaluations."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InputError
from .model import WORDS, LogModel, convert_unit, tolerance

MICRO_RANGE_WORDS = 250
# |APT - E_allowed| below this relative gap counts as exactly on the boundary,
# so an anchor fed back through score() passes despite a last-ulp loss.
BOUNDARY_RTOL = 1e-12


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class ScoreScale:
    """Client score calibration: Passing Threshold and Maximum Score Value."""

    pt: float = 80.0
    msv: float = 100.0

    def __post_init__(self) -> None:
        if not 0 <= self.pt < self.msv <= 100:
            raise InputError(f"need 0 <= PT < MSV <= 100, got PT={self.pt}, MSV={self.msv}")

    @property
    def dpi(self) -> float:
        return self.msv - self.pt


@dataclass(frozen=True)
class Evaluation:
    ewc: float  # evaluation word count
    apt: float  # absolute penalty total

    def __post_init__(self) -> None:
        if not (self.ewc > 0 and math.isfinite(self.ewc)):
            raise InputError(f"EWC must be positive, got {self.ewc!r}")
        if not (self.apt >= 0 and math.isfinite(self.apt)):
            raise InputError(f"APT must be nonnegative, got {self.apt!r}")


@dataclass(frozen=True)
class Scorecard:
    ewc: float
    apt: float
    e_allowed: float
    qf: float
    os: float
    os_disp: float
    dm: float
    verdict: Verdict
    micro_range_flag: bool

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


def score(model: LogModel, scale: ScoreScale, evaluation: Evaluation) -> Scorecard:
    """Score one evaluation against the size-dependent tolerance.

    ``evaluation.ewc`` is in words; a page-based model is converted first.
    The verdict uses the unclipped inequality ``APT <= E_allowed``, which is
    inclusive. Samples under 250 words are still scored but flagged.
    """
    words_model = convert_unit(model, WORDS)
    e_allowed = tolerance(words_model, evaluation.ewc)
    apt = evaluation.apt
    if abs(apt - e_allowed) <= BOUNDARY_RTOL * e_allowed:
        dm, qf = 0.0, 0.0
    else:
        dm = e_allowed - apt
        qf = 1.0 - apt / e_allowed
    os_ = scale.pt + scale.dpi * qf
    return Scorecard(
        ewc=evaluation.ewc,
        apt=apt,
        e_allowed=e_allowed,
        qf=qf,
        os=os_,
        os_disp=min(scale.msv, max(0.0, os_)),
        dm=dm,
        verdict=Verdict.PASS if dm >= 0 else Verdict.FAIL,
        micro_range_flag=evaluation.ewc < MICRO_RANGE_WORDS,
    )


def raw_score(evaluation: Evaluation, alpha: float = 1000.0) -> float:
    """Uncalibrated ``100 - alpha*APT/EWC``; for comparison output only."""
    return 100.0 - alpha * evaluation.apt / evaluation.ewc


def raw_threshold_check(evaluation: Evaluation, r_thr: float) -> Verdict:
    """Pass when the penalty rate (points per word) is at most ``r_thr``."""
    if not r_thr > 0:
        raise InputError(f"r_thr must be positive, got {r_thr!r}")
    return Verdict.PASS if evaluation.apt <= r_thr * evaluation.ewc else Verdict.FAIL
