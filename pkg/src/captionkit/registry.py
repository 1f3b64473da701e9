"""Named, user-extensible tables of caption building blocks."""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .diagnostics import UndefinedName
from .optparse import OptionList, parse_option_list
from .template import (
    LineBreak,
    Template,
    TemplateSyntaxError,
    parse_template,
)

SIZES = ("scriptsize", "footnotesize", "small", "normalsize", "large", "Large")
SERIES = ("md", "bf")
SHAPES = ("up", "it", "sl", "sc")
FAMILIES = ("rm", "sf", "tt")


@dataclass(frozen=True)
class FontSpec:
    """A bundle of font settings; unset attributes are ``None``.

    ``resets`` names attribute groups cleared before this spec's own
    attributes are applied when it is merged over another spec.
    """

    size: Optional[str] = None
    series: Optional[str] = None
    shape: Optional[str] = None
    family: Optional[str] = None
    color: Optional[str] = None
    stretch: Optional[float] = None
    resets: frozenset[str] = frozenset()

    @property
    def line_stretch(self) -> float:
        return 1.0 if self.stretch is None else self.stretch

    def merge(self, other: FontSpec) -> FontSpec:
        result = self._cleared(other.resets)
        updates = {
            name: getattr(other, name)
            for name in ("size", "series", "shape", "family", "color", "stretch")
            if getattr(other, name) is not None
        }
        return replace(result, resets=self.resets | other.resets, **updates)

    def _cleared(self, resets: frozenset[str]) -> FontSpec:
        spec = self
        if "normal" in resets:
            return FontSpec(resets=self.resets)
        if "normalfont" in resets:
            spec = replace(spec, series=None, shape=None, family=None)
        if "normalcolor" in resets:
            spec = replace(spec, color=None)
        return spec

    def attrs(self) -> tuple[str, ...]:
        """Short descriptors used to annotate rendered text."""
        out = []
        if self.size and self.size != "normalsize":
            out.append(self.size)
        for value, default in ((self.series, "md"), (self.shape, "up"), (self.family, "rm")):
            if value and value != default:
                out.append(value)
        if self.color:
            out.append(f"color={self.color}")
        if self.stretch is not None and self.stretch != 1.0:
            out.append(f"stretch={self.stretch:g}")
        return tuple(out)


EMPTY_FONT = FontSpec()


def _builtin_fonts() -> dict[str, FontSpec]:
    fonts: dict[str, FontSpec] = {}
    for s in SIZES:
        fonts[s] = FontSpec(size=s)
    for s in SERIES:
        fonts[s] = FontSpec(series=s)
    for s in SHAPES:
        fonts[s] = FontSpec(shape=s)
    for s in FAMILIES:
        fonts[s] = FontSpec(family=s)
    fonts["normalfont"] = FontSpec(resets=frozenset({"normalfont"}))
    fonts["normalcolor"] = FontSpec(resets=frozenset({"normalcolor"}))
    fonts["normal"] = FontSpec(size="normalsize", stretch=1.0, resets=frozenset({"normal"}))
    fonts["singlespacing"] = FontSpec(stretch=1.0)
    fonts["onehalfspacing"] = FontSpec(stretch=1.5)
    fonts["doublespacing"] = FontSpec(stretch=2.0)
    return fonts


# TeX font switches accepted in \DeclareCaptionFont bodies.
_FONT_SWITCHES: dict[str, FontSpec] = {
    **{s: FontSpec(size=s) for s in SIZES},
    "mdseries": FontSpec(series="md"),
    "bfseries": FontSpec(series="bf"),
    "upshape": FontSpec(shape="up"),
    "itshape": FontSpec(shape="it"),
    "slshape": FontSpec(shape="sl"),
    "scshape": FontSpec(shape="sc"),
    "rmfamily": FontSpec(family="rm"),
    "sffamily": FontSpec(family="sf"),
    "ttfamily": FontSpec(family="tt"),
    "normalfont": FontSpec(resets=frozenset({"normalfont"})),
    "normalcolor": FontSpec(resets=frozenset({"normalcolor"})),
    "singlespacing": FontSpec(stretch=1.0),
    "onehalfspacing": FontSpec(stretch=1.5),
    "doublespacing": FontSpec(stretch=2.0),
}

_FONT_CODE_RE = re.compile(
    r"\s*\\(?:(?P<color>color)\s*\{(?P<cval>[^{}]*)\}|setstretch\s*\{(?P<stretch>[^{}]*)\}|(?P<sw>[A-Za-z]+))\s*"
)


def parse_font_code(code: str) -> FontSpec:
    """Turn a font declaration body like ``\\small\\bfseries`` into a FontSpec."""
    spec = EMPTY_FONT
    pos = 0
    code = code.strip()
    while pos < len(code):
        m = _FONT_CODE_RE.match(code, pos)
        if m is None:
            raise TemplateSyntaxError(f"unsupported font code `{code[pos:]}'")
        if m.group("color"):
            spec = spec.merge(FontSpec(color=m.group("cval").strip()))
        elif m.group("stretch") is not None:
            try:
                spec = spec.merge(FontSpec(stretch=float(m.group("stretch"))))
            except ValueError:
                raise TemplateSyntaxError(f"bad stretch `{m.group('stretch')}'") from None
        else:
            sw = m.group("sw")
            if sw not in _FONT_SWITCHES:
                raise TemplateSyntaxError(f"unsupported command `\\{sw}'")
            spec = spec.merge(_FONT_SWITCHES[sw])
        pos = m.end()
    return spec


# Layout strategy identifiers understood by the line breaker.
JUSTIFICATION_STRATEGIES = (
    "justified",
    "centering",
    "centerlast",
    "centerfirst",
    "raggedright",
    "raggedleft",
)

_JUSTIFICATION_CODE = {
    "": "justified",
    "\\centering": "centering",
    "\\centerlast": "centerlast",
    "\\centerfirst": "centerfirst",
    "\\raggedright": "raggedright",
    "\\RaggedRight": "raggedright",
    "\\raggedleft": "raggedleft",
    "\\RaggedLeft": "raggedleft",
}


def parse_justification_code(code: str) -> str:
    key = code.strip()
    if key in JUSTIFICATION_STRATEGIES:
        return key
    try:
        return _JUSTIFICATION_CODE[key]
    except KeyError:
        raise TemplateSyntaxError(f"unsupported justification code `{key}'") from None


@dataclass(frozen=True)
class FormatEntry:
    template: Template
    vertical: bool = False
    hang: bool = False


@dataclass(frozen=True)
class SeparatorEntry:
    template: Template
    starred: bool = False  # exempt from labelfont

    @property
    def breaks_line(self) -> bool:
        return any(isinstance(t, LineBreak) for t in self.template)


@dataclass(frozen=True)
class StyleEntry:
    options: OptionList
    singleline: OptionList


# Arities of each template table.
FORMAT_ARITY = 3
LABEL_FORMAT_ARITY = 2
SEPARATOR_ARITY = 0
TEXT_FORMAT_ARITY = 1
LIST_FORMAT_ARITY = 2

# What `default` means in each table for the standard article/report/book classes.
STANDARD_PROFILE = {
    "format": "plain",
    "labelformat": "simple",
    "labelsep": "colon",
    "textformat": "simple",
    "justification": "justified",
    "listformat": "subsimple",
}

BASE_STYLE = (
    "format=plain,labelformat=default,labelsep=colon,"
    "justification=justified,font={},labelfont={},"
    "textfont={},margin=0pt,indention=0pt,"
    "parindent=0pt,hangindent=0pt,singlelinecheck=true"
)
DEFAULT_STYLE = (
    "format=default,labelformat=default,labelsep=default,"
    "justification=default,font=default,labelfont=default,"
    "textfont=default,margin=0pt,indention=0pt,"
    "parindent=0pt,hangindent=0pt,singlelinecheck=true"
)
SINGLELINE_OVERRIDES = "justification=centering,indention=0pt"

_UNDEFINED_CODES = {
    "format": "undefined-format",
    "labelformat": "undefined-label-format",
    "labelsep": "undefined-label-separator",
    "textformat": "undefined-text-format",
    "justification": "undefined-justification",
    "listformat": "undefined-list-format",
    "style": "undefined-style",
    "font": "undefined-font",
}


@dataclass
class Registries:
    formats: dict[str, FormatEntry] = field(default_factory=dict)
    label_formats: dict[str, Template] = field(default_factory=dict)
    label_separators: dict[str, SeparatorEntry] = field(default_factory=dict)
    text_formats: dict[str, Template] = field(default_factory=dict)
    justifications: dict[str, str] = field(default_factory=dict)
    fonts: dict[str, FontSpec] = field(default_factory=dict)
    styles: dict[str, StyleEntry] = field(default_factory=dict)
    list_formats: dict[str, Template] = field(default_factory=dict)
    custom_options: dict[str, str] = field(default_factory=dict)
    profile: dict[str, str] = field(default_factory=lambda: dict(STANDARD_PROFILE))

    def copy(self) -> Registries:
        return copy.deepcopy(self)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.custom_options.values())

    # -- declarations

    def declare_format(self, name: str, source: str, vertical: bool = False) -> None:
        self.formats[name] = FormatEntry(parse_template(source, FORMAT_ARITY, self.variables), vertical)

    def declare_label_format(self, name: str, source: str) -> None:
        self.label_formats[name] = parse_template(source, LABEL_FORMAT_ARITY, self.variables)

    def declare_text_format(self, name: str, source: str) -> None:
        self.text_formats[name] = parse_template(source, TEXT_FORMAT_ARITY, self.variables)

    def declare_label_separator(self, name: str, source: str, starred: bool = False) -> None:
        self.label_separators[name] = SeparatorEntry(
            parse_template(source, SEPARATOR_ARITY, self.variables), starred
        )

    def declare_justification(self, name: str, code: str) -> None:
        self.justifications[name] = parse_justification_code(code)

    def declare_font(self, name: str, code: str) -> None:
        self.fonts[name] = parse_font_code(code)

    def declare_list_format(self, name: str, source: str) -> None:
        self.list_formats[name] = parse_template(source, LIST_FORMAT_ARITY, self.variables)

    def declare_style(
        self,
        name: str,
        options: OptionList | str,
        singleline: OptionList | str | None = None,
    ) -> None:
        if isinstance(options, str):
            options = parse_option_list(options)
        if isinstance(singleline, str):
            singleline = parse_option_list(singleline)
        self.styles[name] = StyleEntry(options, singleline or OptionList())

    def declare_option(self, name: str, body: str | None = None) -> None:
        """Bind option ``name`` to a variable.

        ``body`` is ``\\setlength\\var{#1}`` (or the braced ``\\setlength{\\var}{#1}``);
        without a body the variable shares the option's name.
        """
        var = name
        if body is not None and body.strip():
            m = re.fullmatch(
                r"\s*\\setlength\s*(?:\\(?P<a>[A-Za-z]+)|\{\s*\\(?P<b>[A-Za-z]+)\s*\})\s*\{\s*#1\s*\}\s*",
                body,
            )
            if m is None:
                raise TemplateSyntaxError(f"unsupported option body `{body.strip()}'")
            var = m.group("a") or m.group("b")
        self.custom_options[name] = var

    # -- lookups

    def canonical(self, table: str, name: str) -> str:
        """Resolve `default` through the class profile and check existence."""
        if name == "default" and table in self.profile and not self._has(table, "default"):
            name = self.profile[table]
        if not self._has(table, name):
            raise UndefinedName(_UNDEFINED_CODES[table], name)
        return name

    def _has(self, table: str, name: str) -> bool:
        return name in self._table(table)

    def _table(self, table: str) -> dict:
        return {
            "format": self.formats,
            "labelformat": self.label_formats,
            "labelsep": self.label_separators,
            "textformat": self.text_formats,
            "justification": self.justifications,
            "listformat": self.list_formats,
            "style": self.styles,
            "font": self.fonts,
        }[table]

    def lookup(self, table: str, name: str):
        return self._table(table)[self.canonical(table, name)]


def builtin_registries() -> Registries:
    reg = Registries()
    reg.declare_format("plain", "#1#2#3\\par")
    reg.formats["hang"] = FormatEntry(parse_template("#1#2#3\\par", FORMAT_ARITY), hang=True)

    reg.declare_label_format("empty", "")
    reg.declare_label_format("simple", "\\bothIfFirst{#1}{~}#2")
    reg.declare_label_format("brace", "\\bothIfFirst{#1}{~}#2)")
    reg.declare_label_format("parens", "\\bothIfFirst{#1}{~}(#2)")

    reg.declare_label_separator("none", "")
    reg.declare_label_separator("colon", ": ")
    reg.declare_label_separator("period", ". ")
    reg.declare_label_separator("space", " ")
    reg.declare_label_separator("quad", "\\quad", starred=True)
    reg.declare_label_separator("newline", "\\\\", starred=True)
    reg.declare_label_separator("endash", " -- ", starred=True)

    reg.declare_text_format("simple", "#1")
    reg.declare_text_format("period", "#1.")

    for strategy in JUSTIFICATION_STRATEGIES:
        reg.justifications[strategy] = strategy
    # No hyphenation in a cell grid, so RaggedRight cannot differ from raggedright.
    reg.justifications["RaggedRight"] = "raggedright"

    reg.fonts.update(_builtin_fonts())
    reg.fonts["default"] = EMPTY_FONT

    reg.declare_list_format("empty", "")
    reg.declare_list_format("simple", "#1#2")
    reg.declare_list_format("parens", "#1(#2)")
    reg.declare_list_format("subsimple", "#2")
    reg.declare_list_format("subparens", "(#2)")

    reg.declare_style("base", BASE_STYLE, SINGLELINE_OVERRIDES)
    reg.declare_style("default", DEFAULT_STYLE, SINGLELINE_OVERRIDES)
    return reg
