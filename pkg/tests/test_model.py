import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from logtol import InputError, LogModel, SizeUnit, convert_unit, linearize_at, retarget, tolerance
from logtol.model import UnitKind

from .oracles import log_curve_mp

DOC_MODEL = LogModel(3.688, 0.00288)

models = st.builds(
    LogModel,
    a=st.floats(0.01, 100),
    b=st.floats(1e-6, 10),
)


def test_worked_example_tolerance():
    assert tolerance(DOC_MODEL, 3000) == pytest.approx(8.357, abs=5e-4)


def test_origin_is_exactly_zero():
    assert tolerance(DOC_MODEL, 0) == 0.0


def test_survey_fit_curve_at_12_pages_matches_high_precision():
    # golden value frozen from a 50-digit evaluation of 3.353*ln(1 + 0.59046*12)
    golden = 7.008020829871364
    assert log_curve_mp(3.353, 0.59046, 12) == pytest.approx(golden, rel=1e-15)
    m = LogModel(3.353, 0.59046, SizeUnit.pages())
    assert tolerance(m, 12) == pytest.approx(golden, rel=1e-14)


def test_negative_size_rejected():
    with pytest.raises(InputError):
        tolerance(DOC_MODEL, -1)


@pytest.mark.parametrize("a,b", [(0, 1), (1, 0), (-1, 1), (1, math.inf), (math.nan, 1)])
def test_model_requires_positive_parameters(a, b):
    with pytest.raises(InputError):
        LogModel(a, b)


def test_size_unit_validation():
    assert SizeUnit.pages().words_per_page == 250
    with pytest.raises(InputError):
        SizeUnit.pages(0)
    with pytest.raises(InputError):
        SizeUnit.parse("lines")
    assert SizeUnit.parse("Pages", 300) == SizeUnit(UnitKind.PAGES, 300)


class TestConvertUnit:
    def test_pages_to_words(self):
        m = LogModel(3.353, 0.59046, SizeUnit.pages())
        w = convert_unit(m, SizeUnit.words())
        assert w.a == m.a
        assert w.b == pytest.approx(0.00236184, rel=1e-12)

    def test_round_trip(self):
        m = LogModel(3.353, 0.59046, SizeUnit.pages())
        back = convert_unit(convert_unit(m, SizeUnit.words()), SizeUnit.pages())
        assert back.b == pytest.approx(m.b, rel=1e-12)
        assert back.unit == m.unit

    def test_matched_sizes_give_equal_tolerance(self):
        p = convert_unit(DOC_MODEL, SizeUnit.pages())
        assert p.b == pytest.approx(0.72, rel=1e-12)
        assert tolerance(p, 4) == pytest.approx(tolerance(DOC_MODEL, 1000), rel=1e-12)
        assert tolerance(DOC_MODEL, 1000) == pytest.approx(5.0, abs=1e-3)

    def test_custom_page_size(self):
        m = convert_unit(LogModel(2.0, 1.0, SizeUnit.pages(400)), SizeUnit.pages(200))
        assert m.b == pytest.approx(0.5)


class TestLinearize:
    def test_anchor_slope(self):
        slope = linearize_at(DOC_MODEL, 1000)
        assert slope == pytest.approx(0.005, abs=1e-6)
        assert slope * 1000 == pytest.approx(tolerance(DOC_MODEL, 1000), rel=1e-15)

    def test_small_curvature_limit(self):
        c = 0.005
        b = 1e-9
        m = LogModel(c / b, b)
        for x_ref in (1.0, 250.0, 1000.0):  # keep b*x_ref <= 1e-6
            assert linearize_at(m, x_ref) == pytest.approx(c, rel=1e-6)

    def test_rejects_nonpositive_reference(self):
        with pytest.raises(InputError):
            linearize_at(DOC_MODEL, 0)


class TestRetarget:
    def test_reproduces_two_point_scale(self):
        m = retarget(LogModel(1.0, 0.00288), 1000, 5)
        assert m.a == pytest.approx(5 / math.log(3.88), rel=1e-12)
        assert m.a == pytest.approx(3.688, abs=1e-3)

    def test_hits_anchor(self):
        m = retarget(DOC_MODEL, 1234.5, 6.7)
        assert m.b == DOC_MODEL.b
        assert tolerance(m, 1234.5) == pytest.approx(6.7, rel=1e-12)

    def test_fixed_point(self):
        m = retarget(DOC_MODEL, 1500, tolerance(DOC_MODEL, 1500))
        assert m.a == pytest.approx(DOC_MODEL.a, rel=1e-14)

    def test_same_curvature_scales_whole_curve(self):
        # keeping b fixed rescales every tolerance by e0 / E(x_ref); the
        # anchor-sensitivity table instead recalibrates b (see test_calibrate)
        m = retarget(DOC_MODEL, 1000, 4)
        ratio = 4 / tolerance(DOC_MODEL, 1000)
        for x in (250, 2000, 3000):
            assert tolerance(m, x) == pytest.approx(ratio * tolerance(DOC_MODEL, x), rel=1e-12)
        assert tolerance(m, 2000) == pytest.approx(5.638, abs=1e-3)

    def test_rejects_bad_inputs(self):
        with pytest.raises(InputError):
            retarget(DOC_MODEL, 1000, 0)
        with pytest.raises(InputError):
            retarget(DOC_MODEL, -5, 1)


@given(models, st.floats(0, 1e5), st.floats(1e-6, 1e5))
def test_monotone(m, x1, dx):
    x2 = x1 + dx
    assert tolerance(m, x1) < tolerance(m, x2)


@given(models, st.floats(1e-3, 1e5), st.floats(1.001, 100))
def test_sublinear(m, x, k):
    assert tolerance(m, k * x) < k * tolerance(m, x)


@given(models, st.floats(0, 1e6), st.integers(1, 1000))
def test_unit_invariance(m, x_words, wpp):
    pages = convert_unit(m, SizeUnit.pages(wpp))
    assert tolerance(pages, x_words / wpp) == pytest.approx(tolerance(m, x_words), rel=1e-10, abs=1e-300)


@given(models, st.floats(0, 0.999))
def test_taylor_bound(m, bx):
    x = bx / m.b
    slack = 4 * 2.2e-16 * m.a * m.b * x  # rounding of the two evaluations
    assert abs(tolerance(m, x) - m.a * m.b * x) <= m.a * (m.b * x) ** 2 / 2 + slack
