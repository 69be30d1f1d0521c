"""Reading tolerance points and client profiles from disk."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import InputError
from .fidelity import DEFAULT_EPSILON
from .model import DEFAULT_WORDS_PER_PAGE, LogModel, SizeUnit, TolerancePoint
from .scorecard import ScoreScale

PROFILE_DIR_ENV = "LOGTOL_PROFILE_DIR"
DEFAULT_PROFILE_DIR = Path("~/.config/logtol/profiles")


def parse_point(text: str, where: str = "") -> TolerancePoint:
    """Parse ``"x,E"`` or ``"x,E,w"``."""
    fields = [f.strip() for f in text.split(",")]
    if len(fields) not in (2, 3):
        raise InputError(f"{where}expected 'x,E' or 'x,E,w', got {text!r}")
    try:
        values = [float(f) for f in fields]
    except ValueError:
        raise InputError(f"{where}non-numeric value in {text!r}") from None
    try:
        return TolerancePoint(*values)
    except InputError as exc:
        raise InputError(f"{where}{exc}") from None


def read_points(lines: Iterable[str]) -> list[TolerancePoint]:
    """Parse comma-separated points.

    Blank lines and ``#`` comments are skipped. A first row whose first field
    is not numeric is treated as the header (e.g. ``x,E,w``). Errors name the
    1-based line number.
    """
    points: list[TolerancePoint] = []
    first = True
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        row = next(csv.reader([line]))
        if first:
            first = False
            if not _is_number(row[0]):
                header = [h.strip().lower() for h in row]
                if header[:2] != ["x", "e"] or header[2:] not in ([], ["w"]):
                    raise InputError(f"line {lineno}: unrecognised header {line!r} (expected x,E[,w])")
                continue
        points.append(parse_point(",".join(row), where=f"line {lineno}: "))
    return points


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_points(path: str | os.PathLike[str]) -> list[TolerancePoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        return read_points(fh)


@dataclass(frozen=True)
class ProfileConfig:
    """A named client profile: calibrated curve plus score scale."""

    name: str
    model: LogModel
    scale: ScoreScale
    default_epsilon: float = DEFAULT_EPSILON

    @classmethod
    def from_dict(cls, name: str, data: dict) -> ProfileConfig:
        try:
            unit = SizeUnit.parse(
                str(data.get("unit", "words")), int(data.get("words_per_page", DEFAULT_WORDS_PER_PAGE))
            )
            model = LogModel(float(data["a"]), float(data["b"]), unit)
            scale = ScoreScale(float(data.get("pt", 80.0)), float(data.get("msv", 100.0)))
            eps = float(data.get("default_epsilon", DEFAULT_EPSILON))
        except KeyError as exc:
            raise InputError(f"profile {name!r} is missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise InputError(f"profile {name!r}: {exc}") from None
        if not 0 < eps < 1:
            raise InputError(f"profile {name!r}: default_epsilon must lie in (0, 1)")
        return cls(name, model, scale, eps)


def profile_dir() -> Path:
    return Path(os.environ.get(PROFILE_DIR_ENV, DEFAULT_PROFILE_DIR)).expanduser()


def load_profile(name: str) -> ProfileConfig:
    """Load a profile by file path or by name from the profile directory.

    A profile file is a JSON object with ``a``, ``b`` and optional ``unit``,
    ``words_per_page``, ``pt``, ``msv`` and ``default_epsilon``.
    """
    path = Path(name).expanduser()
    if not path.is_file():
        path = profile_dir() / f"{name}.json"
    if not path.is_file():
        raise InputError(f"profile {name!r} not found (looked in {profile_dir()})")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"profile {path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise InputError(f"profile {path}: expected a JSON object")
    return ProfileConfig.from_dict(data.get("name", path.stem), data)
