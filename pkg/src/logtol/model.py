"""The logarithmic tolerance curve E(x) = a * ln(1 + b*x).

A :class:`LogModel` remembers the size unit its ``b`` was expressed in. Only
``b`` depends on the unit; converting between words and pages rescales it and
leaves ``a`` alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import InputError

DEFAULT_WORDS_PER_PAGE = 250


class UnitKind(str, enum.Enum):
    WORDS = "words"
    PAGES = "pages"


@dataclass(frozen=True)
class SizeUnit:
    """A sample-size unit: words, or pages of ``words_per_page`` words."""

    kind: UnitKind = UnitKind.WORDS
    words_per_page: int = DEFAULT_WORDS_PER_PAGE

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", UnitKind(self.kind))
        if isinstance(self.words_per_page, bool) or int(self.words_per_page) != self.words_per_page:
            raise InputError(f"words_per_page must be an integer, got {self.words_per_page!r}")
        if self.words_per_page < 1:
            raise InputError(f"words_per_page must be >= 1, got {self.words_per_page}")
        object.__setattr__(self, "words_per_page", int(self.words_per_page))

    @classmethod
    def words(cls) -> SizeUnit:
        return cls(UnitKind.WORDS)

    @classmethod
    def pages(cls, words_per_page: int = DEFAULT_WORDS_PER_PAGE) -> SizeUnit:
        return cls(UnitKind.PAGES, words_per_page)

    @classmethod
    def parse(cls, name: str, words_per_page: int = DEFAULT_WORDS_PER_PAGE) -> SizeUnit:
        try:
            kind = UnitKind(name.strip().lower())
        except ValueError:
            raise InputError(f"unknown size unit {name!r} (expected 'words' or 'pages')") from None
        return cls(kind, words_per_page)

    @property
    def words_per_unit(self) -> int:
        return 1 if self.kind is UnitKind.WORDS else self.words_per_page

    def to_words(self, x: float) -> float:
        return x * self.words_per_unit

    def __str__(self) -> str:
        if self.kind is UnitKind.WORDS:
            return "words"
        return f"pages({self.words_per_page} words/page)"


WORDS = SizeUnit.words()


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise InputError(f"{name} must be a finite positive number, got {value!r}")
    return value


@dataclass(frozen=True)
class LogModel:
    """Calibrated tolerance curve ``a * ln(1 + b*x)`` with x in ``unit``."""

    a: float
    b: float
    unit: SizeUnit = field(default=WORDS)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    def __call__(self, x: float) -> float:
        return tolerance(self, x)


@dataclass(frozen=True)
class LinearModel:
    """Proportional tolerance ``c * x`` (the classic linear rule)."""

    c: float
    unit: SizeUnit = field(default=WORDS)

    def __call__(self, x: float) -> float:
        return self.c * x


@dataclass(frozen=True)
class TolerancePoint:
    """One elicited pair: at size ``x`` at most ``e`` penalty points pass."""

    x: float
    e: float
    w: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _positive("x", self.x))
        object.__setattr__(self, "e", _positive("e", self.e))
        object.__setattr__(self, "w", _positive("w", self.w))


def tolerance(model: LogModel, x: float) -> float:
    """Allowed penalty points at size ``x`` (in ``model.unit``).

    Uses ``log1p`` so tiny curvatures keep full precision. ``x = 0`` is
    accepted and returns exactly 0.
    """
    if not x >= 0:
        raise InputError(f"size must be nonnegative, got {x!r}")
    return model.a * math.log1p(model.b * x)


def convert_unit(model: LogModel, target: SizeUnit) -> LogModel:
    """Express ``model`` in ``target`` units; only ``b`` changes."""
    if model.unit == target:
        return model
    b = model.b * target.words_per_unit / model.unit.words_per_unit
    return LogModel(model.a, b, target)


def linearize_at(model: LogModel, x_ref: float) -> float:
    """Slope of the linear rule anchored to the curve at ``x_ref``.

    The anchored rule is ``E_lin(x) = E(x_ref) * x / x_ref``, so the slope is
    ``E(x_ref) / x_ref``. For small ``b*x_ref`` it approaches ``a*b``.
    """
    x_ref = _positive("x_ref", x_ref)
    return tolerance(model, x_ref) / x_ref


def retarget(model: LogModel, x_ref: float, e0: float) -> LogModel:
    """Same curvature, new anchor: solve ``a`` so that ``E(x_ref) = e0``."""
    x_ref = _positive("x_ref", x_ref)
    e0 = _positive("e0", e0)
    return LogModel(e0 / math.log1p(model.b * x_ref), model.b, model.unit)
