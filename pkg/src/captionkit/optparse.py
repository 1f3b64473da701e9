"""Option-list, dimension and boolean parsing for the caption option language.

Option lists are comma-separated ``key`` or ``key=value`` items.  Braces group
text so that commas and equal signs inside them do not split; exactly one
level of braces around a whole value is removed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .diagnostics import CaptionError


class UnbalancedBraces(CaptionError):
    code = "unbalanced-braces"

    def __init__(self, position: int) -> None:
        self.position = position
        super().__init__(position=position)


class EmptyKey(CaptionError):
    code = "empty-key"

    def __init__(self, position: int) -> None:
        self.position = position
        super().__init__(position=position)


class BadDimension(CaptionError):
    code = "bad-dimension"

    def __init__(self, text: str) -> None:
        self.text = text
        super().__init__(text=text)


class UndefinedBooleanValue(CaptionError):
    code = "undefined-boolean"

    def __init__(self, value: str) -> None:
        self.value = value
        super().__init__(value=value)


# Keys whose values are themselves option lists (font option bundles).
NESTED_KEYS = frozenset(
    {"font", "labelfont", "textfont", "font+", "labelfont+", "textfont+"}
)

Value = Union[str, "OptionList", None]


@dataclass(frozen=True)
class OptionList:
    entries: tuple[tuple[str, Value], ...] = ()

    def __iter__(self) -> Iterator[tuple[str, Value]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __add__(self, other: OptionList) -> OptionList:
        return OptionList(self.entries + other.entries)

    def keys(self) -> list[str]:
        return [k for k, _ in self.entries]

    def serialize(self) -> str:
        return ",".join(_serialize_entry(k, v) for k, v in self.entries)

    def __str__(self) -> str:
        return self.serialize()


def _serialize_entry(key: str, value: Value) -> str:
    if value is None:
        return key
    if isinstance(value, OptionList):
        return f"{key}={{{value.serialize()}}}"
    if _needs_braces(value):
        return f"{key}={{{value}}}"
    return f"{key}={value}"


def _needs_braces(value: str) -> bool:
    if value == "" or value != value.strip():
        return True
    if "," in value or "=" in value:
        return True
    return value.startswith("{") and _group_end(value, 0) == len(value) - 1


def _group_end(text: str, start: int) -> int:
    """Index of the brace closing the group opened at ``start``, or -1."""
    depth = 0
    for i in range(start, len(text)):
        c = text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i
    return -1


def _split_top(text: str, sep: str, offset: int = 0) -> list[tuple[int, str]]:
    """Split at depth-0 occurrences of ``sep``; returns (start offset, piece)."""
    pieces = []
    depth = 0
    start = 0
    for i, c in enumerate(text):
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth < 0:
                raise UnbalancedBraces(offset + i)
        elif c == sep and depth == 0:
            pieces.append((offset + start, text[start:i]))
            start = i + 1
    if depth != 0:
        raise UnbalancedBraces(offset + len(text))
    pieces.append((offset + start, text[start:]))
    return pieces


def strip_braces(value: str) -> str:
    """Remove one level of braces if they enclose the whole value."""
    if value.startswith("{") and _group_end(value, 0) == len(value) - 1:
        return value[1:-1]
    return value


def parse_option_list(text: str, _offset: int = 0) -> OptionList:
    entries: list[tuple[str, Value]] = []
    for start, item in _split_top(text, ",", _offset):
        if not item.strip():
            continue
        eq = _find_top(item, "=")
        if eq < 0:
            entries.append((item.strip(), None))
            continue
        key = item[:eq].strip()
        if not key:
            raise EmptyKey(start + eq)
        raw = item[eq + 1 :].strip()
        value = strip_braces(raw)
        if key in NESTED_KEYS:
            inner_offset = start + eq + 1 + (len(item[eq + 1 :]) - len(item[eq + 1 :].lstrip()))
            if value is not raw:
                inner_offset += 1
            entries.append((key, parse_option_list(value, inner_offset)))
        else:
            entries.append((key, value))
    return OptionList(tuple(entries))


def _find_top(text: str, ch: str) -> int:
    depth = 0
    for i, c in enumerate(text):
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
        elif c == ch and depth == 0:
            return i
    return -1


def split_values(text: str) -> list[str]:
    """Split a raw value like ``1cm,0cm`` at depth-0 commas, trimming each part."""
    return [strip_braces(piece.strip()) for _, piece in _split_top(text, ",")]


# Points per unit. The em is pinned so that parsing never depends on a font.
UNITS: dict[str, float] = {
    "pt": 1.0,
    "in": 72.27,
    "cm": 28.45,
    "mm": 2.845,
    "em": 12.0,
}
RELATIVE_UNITS = ("\\linewidth", "\\textwidth")

_DIMENSION_RE = re.compile(
    r"^\s*(?P<num>[+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*"
    r"(?P<unit>pt|in|cm|mm|em|\\linewidth|\\textwidth)\s*$"
)


@dataclass(frozen=True)
class Dimension:
    """A length in points plus an optional fraction of the container width."""

    points: float = 0.0
    relative: float | None = None

    def to_points(self, container_points: float) -> float:
        return self.points + (self.relative or 0.0) * container_points

    def __neg__(self) -> Dimension:
        rel = None if self.relative is None else -self.relative
        return Dimension(-self.points, rel)

    def __str__(self) -> str:
        if self.relative is not None and self.points == 0:
            return f"{self.relative:g}\\linewidth"
        if self.relative is not None:
            return f"{self.points:g}pt+{self.relative:g}\\linewidth"
        return f"{self.points:g}pt"


ZERO = Dimension(0.0)


def parse_dimension(text: str) -> Dimension:
    m = _DIMENSION_RE.match(text)
    if m is None:
        raise BadDimension(text)
    num, unit = m.group("num"), m.group("unit")
    if unit in RELATIVE_UNITS:
        if num in ("", "+", "-"):
            return Dimension(0.0, -1.0 if num == "-" else 1.0)
        return Dimension(0.0, float(num))
    if num in ("", "+", "-"):
        raise BadDimension(text)
    return Dimension(float(num) * UNITS[unit])


TRUE_LITERALS = frozenset({"true", "yes", "on", "1"})
FALSE_LITERALS = frozenset({"false", "no", "off", "0"})


def parse_bool(text: str) -> bool:
    value = text.strip()
    if value in TRUE_LITERALS:
        return True
    if value in FALSE_LITERALS:
        return False
    raise UndefinedBooleanValue(text)
