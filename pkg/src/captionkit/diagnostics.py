"""Warning and error catalog.

Every message the engine emits is produced from one of the templates below,
so the text users see is fixed and testable. The first group reproduces the
caption package's own English messages; the second group covers situations
the package never reports because they cannot occur inside TeX (scenario
syntax, cell-grid overflow, and similar).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class Severity(enum.Enum):
    WARNING = "warning"
    ERROR = "error"


# code -> (severity, template); placeholders use str.format syntax.
CATALOG: dict[str, tuple[Severity, str]] = {
    "undefined-style": (Severity.ERROR, "Undefined style `{name}'."),
    "undefined-format": (Severity.ERROR, "Undefined format `{name}'."),
    "undefined-label-format": (Severity.ERROR, "Undefined label format `{name}'."),
    "undefined-label-separator": (Severity.ERROR, "Undefined label separator `{name}'."),
    "undefined-list-format": (Severity.ERROR, "Undefined list format `{name}'."),
    "undefined-text-format": (Severity.ERROR, "Undefined text format `{name}'."),
    "undefined-position": (Severity.ERROR, "Undefined position `{name}'."),
    "undefined-boolean": (Severity.ERROR, "Undefined boolean value `{value}'."),
    "option-not-in-list": (Severity.WARNING, "Option `{option}' was not in list `{list}'."),
    "option-list-undefined": (Severity.WARNING, "Option list `{list}' undefined."),
    "unused-setup": (Severity.WARNING, "Unused \\captionsetup[{type}]."),
    "caption-outside-float": (Severity.ERROR, "\\caption outside float."),
    "continued-outside-float": (Severity.ERROR, "\\ContinuedFloat outside float."),
    "continued-after": (Severity.ERROR, "Continued `{type}' after `{other}'."),
    "no-float-type": (Severity.ERROR, "No float type '{type}' defined."),
    "labelsep-hang": (
        Severity.ERROR,
        "The option `labelsep={name}' does not work with `format=hang'.",
    ),
}

# Messages with no counterpart in the package documentation.
SUPPLEMENTARY: dict[str, tuple[Severity, str]] = {
    "undefined-justification": (Severity.ERROR, "Undefined justification `{name}'."),
    "undefined-font": (Severity.ERROR, "Undefined font option `{name}'."),
    "unknown-option": (Severity.ERROR, "Unknown option `{name}'."),
    "bad-dimension": (Severity.ERROR, "Invalid dimension `{text}'."),
    "negative-skip": (Severity.ERROR, "Negative skip `{text}' not allowed."),
    "unbalanced-braces": (Severity.ERROR, "Unbalanced braces at position {position}."),
    "empty-key": (Severity.ERROR, "Missing option name at position {position}."),
    "template-syntax": (Severity.ERROR, "Invalid caption template: {detail}."),
    "unbound-variable": (Severity.ERROR, "Undefined variable `\\{name}'."),
    "word-too-wide": (
        Severity.ERROR,
        "Word `{word}' does not fit into {width} cells.",
    ),
    "not-legacy": (Severity.ERROR, "`{name}' is not an obsolete option."),
    "nested-float": (Severity.ERROR, "Float `{type}' opened inside `{outer}'."),
    "end-without-begin": (Severity.ERROR, "End of float without matching begin."),
    "unclosed-float": (Severity.ERROR, "Float `{type}' not closed."),
    "scenario-syntax": (Severity.ERROR, "Scenario syntax error: {detail}."),
}

_ALL = {**CATALOG, **SUPPLEMENTARY}


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    line: int | None = None

    def format(self, source: str | None = None) -> str:
        where = ""
        if source is not None:
            where = f"{source}:{self.line}: " if self.line is not None else f"{source}: "
        return f"{where}{self.severity.value}: {self.message}"


def make(code: str, line: int | None = None, **params: object) -> Diagnostic:
    severity, template = _ALL[code]
    return Diagnostic(severity, code, template.format(**params), line)


def message_patterns() -> dict[str, re.Pattern[str]]:
    """Regex per catalog code matching any substituted message."""
    patterns = {}
    for code, (_, template) in _ALL.items():
        parts = re.split(r"\{[a-z]+\}", template)
        patterns[code] = re.compile("^" + "(.*)".join(re.escape(p) for p in parts) + "$")
    return patterns


class CaptionError(Exception):
    """Base class; carries the diagnostic it corresponds to."""

    code = "scenario-syntax"

    def __init__(self, **params: object) -> None:
        self.params = params
        self.diagnostic = make(self.code, **params)
        super().__init__(self.diagnostic.message)


class UndefinedName(CaptionError):
    """Lookup of a name that no registry table contains."""

    def __init__(self, code: str, name: str) -> None:
        self.code = code
        self.name = name
        super().__init__(name=name)


class UnknownOption(CaptionError):
    code = "unknown-option"


class NotLegacy(CaptionError):
    code = "not-legacy"


class ScenarioSyntaxError(CaptionError):
    code = "scenario-syntax"
