import math

import numpy as np
import pytest

from logtol import InputError, LogModel, SizeUnit
from logtol.fidelity import fidelity_interval
from logtol.model import linearize_at, tolerance
from logtol.scorecard import (
    Evaluation,
    ScoreScale,
    Verdict,
    raw_score,
    raw_threshold_check,
    score,
)

REF = LogModel(3.688, 0.00288)
SCALE = ScoreScale(80, 100)


class TestScore:
    def test_worked_example_pass(self):
        card = score(REF, SCALE, Evaluation(3000, 7))
        assert card.e_allowed == pytest.approx(8.357, abs=5e-4)
        assert card.qf == pytest.approx(0.162, abs=5e-4)
        assert card.os == pytest.approx(83.25, abs=5e-3)
        assert card.dm == pytest.approx(1.36, abs=5e-3)
        assert card.verdict is Verdict.PASS and card.passed
        assert not card.micro_range_flag

    def test_worked_example_fail(self):
        card = score(REF, SCALE, Evaluation(3000, 9))
        assert card.qf == pytest.approx(-0.077, abs=5e-4)
        assert card.os == pytest.approx(78.46, abs=5e-3)
        assert card.dm == pytest.approx(-0.64, abs=5e-3)
        assert card.verdict is Verdict.FAIL

    def test_zero_penalties(self):
        card = score(REF, ScoreScale(70, 95), Evaluation(1234, 0))
        assert card.qf == 1.0 and card.os == 95 and card.os_disp == 95
        assert card.passed

    def test_display_clipping(self):
        card = score(REF, SCALE, Evaluation(1000, 100))
        assert card.os < 0 and card.os_disp == 0.0 and not card.passed

    def test_page_model_matches_word_model(self):
        pages = LogModel(3.688, 0.00288 * 250, SizeUnit.pages())
        a = score(pages, SCALE, Evaluation(3000, 7))
        b = score(REF, SCALE, Evaluation(3000, 7))
        assert a.e_allowed == pytest.approx(b.e_allowed, rel=1e-12)

    def test_micro_range_flag(self):
        assert score(REF, SCALE, Evaluation(249, 0)).micro_range_flag
        assert not score(REF, SCALE, Evaluation(250, 0)).micro_range_flag

    def test_boundary_is_inclusive(self):
        for ewc in (1.0, 250.0, 1000.0, 3000.0, 123456.0):
            e = tolerance(REF, ewc)
            card = score(REF, SCALE, Evaluation(ewc, e))
            assert card.qf == 0 and card.dm == 0 and card.os == SCALE.pt
            assert card.passed

    @pytest.mark.parametrize("ewc, apt", [(0, 1), (-5, 1), (100, -1), (math.inf, 1), (100, math.nan)])
    def test_invalid_evaluation(self, ewc, apt):
        with pytest.raises(InputError):
            Evaluation(ewc, apt)

    @pytest.mark.parametrize("pt, msv", [(80, 80), (-1, 100), (50, 101)])
    def test_invalid_scale(self, pt, msv):
        with pytest.raises(InputError):
            ScoreScale(pt, msv)


def test_verdict_equivalences_randomised():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        model = LogModel(rng.uniform(0.5, 10), 10 ** rng.uniform(-5, -1))
        pt = rng.uniform(0, 95)
        scale = ScoreScale(pt, rng.uniform(pt + 1, 100))
        ewc = 10 ** rng.uniform(1, 5)
        e = tolerance(model, ewc)
        apt = e if rng.random() < 0.05 else rng.uniform(0, 2 * e)
        card = score(model, scale, Evaluation(ewc, apt))
        passed = card.verdict is Verdict.PASS
        assert passed == (card.apt <= card.e_allowed) == (card.dm >= 0) == (card.qf >= 0) == (card.os >= scale.pt)
        assert 0 <= card.os_disp <= scale.msv


def test_strictly_decreasing_in_apt():
    apts = np.linspace(0, 20, 201)
    cards = [score(REF, SCALE, Evaluation(2000, float(a))) for a in apts]
    assert all(c1.os > c2.os and c1.dm > c2.dm for c1, c2 in zip(cards, cards[1:]))


def test_log_never_more_lenient_beyond_fidelity_band():
    x_ref = 1000
    c = linearize_at(REF, x_ref)
    x_upper = fidelity_interval(REF, x_ref).x_upper
    rng = np.random.default_rng(5)
    for _ in range(2000):
        ewc = float(rng.uniform(x_upper * 1.0001, 20 * x_upper))
        apt = float(rng.uniform(0, 2 * c * ewc))
        log_pass = score(REF, SCALE, Evaluation(ewc, apt)).passed
        lin_pass = apt <= c * ewc
        assert not (log_pass and not lin_pass)


class TestRaw:
    @pytest.mark.parametrize("ewc, apt, expected", [(1000, 5, 95.0), (2000, 0, 100.0), (500, 2.5, 95.0)])
    def test_raw_score(self, ewc, apt, expected):
        assert raw_score(Evaluation(ewc, apt)) == pytest.approx(expected, abs=1e-12)

    def test_threshold_inclusive(self):
        assert raw_threshold_check(Evaluation(1000, 5), 0.005) is Verdict.PASS
        assert raw_threshold_check(Evaluation(1000, 5.01), 0.005) is Verdict.FAIL

    def test_raw_rule_passes_what_log_rule_fails(self):
        ev = Evaluation(2000, 10)
        assert raw_threshold_check(ev, 0.005) is Verdict.PASS
        card = score(REF, SCALE, ev)
        assert card.e_allowed == pytest.approx(7.05, abs=0.01)
        assert card.verdict is Verdict.FAIL

    def test_threshold_must_be_positive(self):
        with pytest.raises(InputError):
            raw_threshold_check(Evaluation(1000, 5), 0)
