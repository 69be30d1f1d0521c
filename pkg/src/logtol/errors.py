"""Exception hierarchy shared by every logtol module."""

from __future__ import annotations

from typing import Any


class LogTolError(Exception):
    """Base class for all errors raised by logtol."""


class InputError(LogTolError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateDataError(InputError):
    """The data cannot identify the requested model (e.g. all sizes equal)."""


class DomainError(InputError):
    """A special-function argument lies outside its real domain."""


class NumericError(LogTolError, ArithmeticError):
    """A numerical procedure failed to bracket, converge or verify.

    ``diagnostics`` carries whatever state is useful for a bug report.
    """

    def __init__(self, message: str, **diagnostics: Any) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics


class CalibrationError(LogTolError):
    """Two tolerance points admit no curve with a > 0 and b > 0."""

    def __init__(self, message: str, report: Any) -> None:
        super().__init__(message)
        self.report = report
