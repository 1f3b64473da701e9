"""Option scopes and their composition into resolved caption settings.

Options accumulate in scopes (package load, global setup, per float type,
local to one float).  ``SettingsStore.resolve`` replays them in that order on
top of the standard-class defaults; later assignments win.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

from . import diagnostics as diag
from .diagnostics import CaptionError, Diagnostic, NotLegacy, UndefinedName, UnknownOption
from .optparse import (
    ZERO,
    BadDimension,
    Dimension,
    OptionList,
    parse_bool,
    parse_dimension,
    parse_option_list,
    split_values,
)
from .registry import EMPTY_FONT, FontSpec, Registries, builtin_registries
from .template import VarValue


class NegativeSkip(CaptionError):
    code = "negative-skip"


class NoFloatType(CaptionError):
    code = "no-float-type"

    def __init__(self, type: str) -> None:
        self.type = type
        super().__init__(type=type)


POSITIONS = {
    "top": "top",
    "above": "top",
    "t": "top",
    "bottom": "bottom",
    "below": "bottom",
    "b": "bottom",
    "auto": "auto",
}

# caption v1.x options and caption2 v2.x options with their modern equivalents.
LEGACY_TABLE: dict[str, OptionList] = {
    name: parse_option_list(opts)
    for name, opts in {
        "normal": "format=plain",
        "hang": "format=hang",
        "isu": "format=hang",
        "center": "justification=centering",
        "centerlast": "justification=centerlast",
        "nooneline": "singlelinecheck=off",
        "scriptsize": "font=scriptsize",
        "footnotesize": "font=footnotesize",
        "small": "font=small",
        "normalsize": "font=normalsize",
        "large": "font=large",
        "Large": "font=Large",
        "up": "labelfont=up",
        "it": "labelfont=it",
        "sl": "labelfont=sl",
        "sc": "labelfont=sc",
        "md": "labelfont=md",
        "bf": "labelfont=bf",
        "rm": "labelfont=rm",
        "sf": "labelfont=sf",
        "tt": "labelfont=tt",
        "flushleft": "justification=raggedright",
        "flushright": "justification=raggedleft",
        "oneline": "singlelinecheck=on",
    }.items()
}


def map_legacy(key: str, value: Optional[str] = None) -> OptionList:
    if value is not None or key not in LEGACY_TABLE:
        raise NotLegacy(name=key)
    return LEGACY_TABLE[key]


# Keys accepted for interface compatibility that have no effect on a cell grid.
INERT_KEYS = frozenset({"hypcapspace", "subtype", "FPlist", "FPref"})
INERT_BOOL_KEYS = frozenset({"hypcap", "compatibility"})


@dataclass
class CaptionSettings:
    format: str = "plain"
    labelformat: str = "simple"
    labelsep: str = "colon"
    textformat: str = "simple"
    justification: str = "justified"
    font: FontSpec = EMPTY_FONT
    labelfont: FontSpec = EMPTY_FONT
    textfont: FontSpec = EMPTY_FONT
    margin_left: Dimension = ZERO
    margin_right: Dimension = ZERO
    width: Optional[Dimension] = None
    minmargin: Optional[Dimension] = None
    maxmargin: Optional[Dimension] = None
    indention: Dimension = ZERO
    hangindent: Dimension = ZERO
    parindent: Dimension = ZERO
    parskip: Dimension = ZERO
    skip: Dimension = Dimension(10.0)
    belowskip: Dimension = ZERO
    position: str = "auto"
    singlelinecheck: bool = True
    list: bool = True
    listformat: str = "subsimple"
    names: dict[str, str] = field(default_factory=dict)
    list_names: dict[str, str] = field(default_factory=dict)
    within: dict[str, str] = field(default_factory=dict)
    name: Optional[str] = None
    strut: bool = True
    sidedness: Optional[str] = None
    type: Optional[str] = None
    vars: dict[str, VarValue] = field(default_factory=dict)
    extras: dict[str, object] = field(default_factory=dict)
    singleline_options: OptionList = OptionList()
    # Fully resolved variant used when the single-line check fires.
    singleline: Optional[CaptionSettings] = None

    def clone(self) -> CaptionSettings:
        return copy.deepcopy(self)

    def display_name(self, float_type: str) -> str:
        if self.name is not None:
            return self.name
        return self.names.get(float_type, float_type[:1].upper() + float_type[1:])


@dataclass(frozen=True)
class Context:
    page: int = 1
    sidedness: str = "oneside"
    container_points: float = 432.0  # 72 cells of 6pt


@dataclass(frozen=True)
class FloatTypeDefaults:
    display_name: str
    list_heading: str
    within: str = "none"


@dataclass
class Scope:
    level: str  # "package", "global", "type" or "local"
    name: str = ""
    options: OptionList = OptionList()
    starred: bool = False
    consumed: bool = False

    @property
    def label(self) -> str:
        return self.name if self.level == "type" else self.level

    def append(self, opts: OptionList) -> None:
        self.options = self.options + opts


class SettingsStore:
    def __init__(self, registries: Registries | None = None) -> None:
        self.registries = registries if registries is not None else builtin_registries()
        self.type_defaults: dict[str, FloatTypeDefaults] = {
            "figure": FloatTypeDefaults("Figure", "List of Figures"),
            "table": FloatTypeDefaults("Table", "List of Tables"),
        }
        self.package = Scope("package")
        self.global_scope = Scope("global")
        self.type_scopes: dict[str, Scope] = {}

    @property
    def float_types(self) -> set[str]:
        return set(self.type_defaults)

    def declare_type(self, name: str, display_name: str, list_heading: str, within: str = "none") -> None:
        self.type_defaults[name] = FloatTypeDefaults(display_name, list_heading, within)

    def scope(self, spec: str | Scope) -> Scope:
        if isinstance(spec, Scope):
            return spec
        if spec == "package":
            return self.package
        if spec == "global":
            return self.global_scope
        if spec.startswith("type:"):
            name = spec[5:]
            if name not in self.type_scopes:
                self.type_scopes[name] = Scope("type", name)
            return self.type_scopes[name]
        raise ValueError(f"unknown scope {spec!r}")

    # -- setup

    def setup(self, scope: str | Scope, opts: OptionList | str, starred: bool = False) -> list[Diagnostic]:
        """Validate ``opts`` and append the valid entries to ``scope``."""
        if isinstance(opts, str):
            opts = parse_option_list(opts)
        target = self.scope(scope)
        if starred:
            target.starred = True
        diagnostics: list[Diagnostic] = []
        kept: list = []
        scratch = self.defaults()
        for key, value in opts:
            entry = OptionList(((key, value),))
            try:
                redirect = self._type_alias(key)
                if redirect is not None and target.level != "local":
                    self._apply(scratch, OptionList((("position", value),)), redirect)
                    alias_scope = self.scope(f"type:{redirect}")
                    alias_scope.append(OptionList((("position", value),)))
                    if starred:
                        alias_scope.starred = True
                    continue
                self._apply(scratch, entry, target.name or None)
            except CaptionError as exc:
                diagnostics.append(exc.diagnostic)
                continue
            kept.append((key, value))
        target.append(OptionList(tuple(kept)))
        return diagnostics

    def _type_alias(self, key: str) -> Optional[str]:
        if key.endswith("position") and key[: -len("position")] in self.type_defaults:
            return key[: -len("position")]
        return None

    def clear_setup(self, type_name: str, keys: list[str] | None = None, starred: bool = False) -> list[Diagnostic]:
        scope = self.type_scopes.get(type_name)
        if scope is None:
            return [] if starred else [diag.make("option-list-undefined", list=type_name)]
        if keys is None:
            del self.type_scopes[type_name]
            return []
        diagnostics = []
        present = set(scope.options.keys())
        for k in keys:
            if k not in present and not starred:
                diagnostics.append(diag.make("option-not-in-list", option=k, list=type_name))
        scope.options = OptionList(tuple((k, v) for k, v in scope.options if k not in keys))
        return diagnostics

    def show_setup(self, scope: str | Scope) -> str:
        target = self.scope(scope)
        return f"Caption options for `{target.label}': {target.options.serialize()}"

    def unused_setups(self) -> list[Diagnostic]:
        return [
            diag.make("unused-setup", type=name)
            for name, scope in self.type_scopes.items()
            if not scope.consumed and not scope.starred
        ]

    # -- resolution

    def defaults(self) -> CaptionSettings:
        s = CaptionSettings(
            names={t: d.display_name for t, d in self.type_defaults.items()},
            list_names={t: d.list_heading for t, d in self.type_defaults.items()},
            within={t: d.within for t, d in self.type_defaults.items()},
        )
        self._apply(s, OptionList((("style", "default"),)), None)
        return s

    def resolve(
        self,
        float_type: Optional[str],
        local: OptionList | Scope | None = None,
        ctx: Context | None = None,
        consume: bool = True,
    ) -> CaptionSettings:
        ctx = ctx or Context()
        s = self.defaults()
        self._apply(s, self.package.options, float_type)
        self._apply(s, self.global_scope.options, float_type)
        if float_type is not None and float_type in self.type_scopes:
            scope = self.type_scopes[float_type]
            self._apply(s, scope.options, float_type)
            if consume:
                scope.consumed = True
        if isinstance(local, Scope):
            local = local.options
        if local:
            self._apply(s, local, float_type)
        variant = None
        if s.singleline_options:
            variant = s.clone()
            self._apply(variant, s.singleline_options, float_type)
            self._finalize(variant, ctx)
        self._finalize(s, ctx)
        s.singleline = variant
        return s

    def _finalize(self, s: CaptionSettings, ctx: Context) -> None:
        sidedness = s.sidedness or ctx.sidedness
        if sidedness == "twoside" and ctx.page % 2 == 0:
            s.margin_left, s.margin_right = s.margin_right, s.margin_left
        if s.minmargin is not None or s.maxmargin is not None:
            s.margin_left = _clamp(s.margin_left, s.minmargin, s.maxmargin, ctx.container_points)
            s.margin_right = _clamp(s.margin_right, s.minmargin, s.maxmargin, ctx.container_points)

    # -- option application

    def apply(self, s: CaptionSettings, opts: OptionList | str, float_type: Optional[str] = None) -> None:
        if isinstance(opts, str):
            opts = parse_option_list(opts)
        self._apply(s, opts, float_type)

    def _apply(self, s: CaptionSettings, opts: OptionList, float_type: Optional[str]) -> None:
        for key, value in opts:
            self._apply_one(s, key, value, float_type)

    def _apply_one(self, s: CaptionSettings, key: str, value, float_type: Optional[str]) -> None:
        reg = self.registries
        handler = _NAME_KEYS.get(key)
        if handler is not None:
            setattr(s, handler, reg.canonical(_TABLE_OF[handler], _text(value)))
            return
        if key == "style":
            style = reg.lookup("style", _text(value))
            self._apply(s, style.options, float_type)
            s.singleline_options = style.singleline
        elif key in ("font", "labelfont", "textfont"):
            setattr(s, key, self._font(value))
        elif key in ("font+", "labelfont+", "textfont+"):
            attr = key[:-1]
            setattr(s, attr, getattr(s, attr).merge(self._font(value)))
        elif key == "margin":
            s.margin_left, s.margin_right = _margin_pair(_text(value))
            s.width = None
        elif key == "margin*":
            if s.width is None:
                s.margin_left, s.margin_right = _margin_pair(_text(value))
        elif key == "width":
            s.width = parse_dimension(_text(value))
        elif key in ("minmargin", "maxmargin"):
            text = _text(value)
            setattr(s, key, None if text == "none" else parse_dimension(text))
        elif key in ("indention", "hangindent", "parindent", "parskip", "belowskip"):
            setattr(s, key, parse_dimension(_text(value)))
        elif key in ("skip", "aboveskip"):
            dim = parse_dimension(_text(value))
            if dim.points < 0 or (dim.relative or 0) < 0:
                raise NegativeSkip(text=_text(value))
            s.skip = dim
        elif key == "position":
            text = _text(value)
            if text not in POSITIONS:
                raise UndefinedName("undefined-position", text)
            s.position = POSITIONS[text]
        elif key in ("singlelinecheck", "list", "strut"):
            setattr(s, key, True if value is None else parse_bool(_text(value)))
        elif key in ("oneside", "twoside"):
            if value is not None:
                raise UnknownOption(name=f"{key}={_text(value)}")
            s.sidedness = key
        elif key == "name":
            s.name = _text(value)
        elif key in ("type", "type*"):
            text = _text(value)
            if text not in self.type_defaults:
                raise NoFloatType(type=text)
            s.type = text
        elif key == "options":
            self._apply(s, parse_option_list(_text(value)), float_type)
        elif key in INERT_BOOL_KEYS:
            s.extras[key] = True if value is None else parse_bool(_text(value))
        elif key in INERT_KEYS:
            s.extras[key] = value
        elif self._type_key(s, key, value, float_type):
            pass
        elif value is None and key in LEGACY_TABLE:
            self._apply(s, LEGACY_TABLE[key], float_type)
        elif key in reg.custom_options:
            s.vars[reg.custom_options[key]] = _var_value(_text(value))
        else:
            raise UnknownOption(name=key)

    def _type_key(self, s: CaptionSettings, key: str, value, float_type: Optional[str]) -> bool:
        """Handle <type>name, list<type>name, <type>within and <type>position."""
        types = self.type_defaults
        if key.startswith("list") and key.endswith("name") and key[4:-4] in types:
            s.list_names[key[4:-4]] = _text(value)
        elif key.endswith("name") and key[:-4] in types:
            s.names[key[:-4]] = _text(value)
        elif key.endswith("within") and key[:-6] in types:
            s.within[key[:-6]] = _text(value)
        elif key.endswith("position") and key[:-8] in types:
            text = _text(value)
            if text not in POSITIONS:
                raise UndefinedName("undefined-position", text)
            if key[:-8] == float_type:
                s.position = POSITIONS[text]
        else:
            return False
        return True

    def _font(self, value) -> FontSpec:
        if value is None:
            return EMPTY_FONT
        if isinstance(value, str):
            value = parse_option_list(value)
        spec = EMPTY_FONT
        for name, arg in value:
            if name == "stretch" and arg is not None:
                try:
                    spec = spec.merge(FontSpec(stretch=float(_text(arg))))
                except ValueError:
                    raise UndefinedName("undefined-font", f"stretch={_text(arg)}") from None
            elif name == "color" and arg is not None:
                spec = spec.merge(FontSpec(color=_text(arg)))
            elif arg is None:
                spec = spec.merge(self.registries.lookup("font", name))
            else:
                raise UndefinedName("undefined-font", f"{name}={_text(arg)}")
        return spec


_NAME_KEYS = {
    "format": "format",
    "labelformat": "labelformat",
    "labelsep": "labelsep",
    "labelseparator": "labelsep",
    "textformat": "textformat",
    "justification": "justification",
    "listformat": "listformat",
}
_TABLE_OF = {
    "format": "format",
    "labelformat": "labelformat",
    "labelsep": "labelsep",
    "textformat": "textformat",
    "justification": "justification",
    "listformat": "listformat",
}


def _text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, OptionList):
        return value.serialize()
    return value


def _margin_pair(text: str) -> tuple[Dimension, Dimension]:
    parts = split_values(text)
    if len(parts) == 1:
        dim = parse_dimension(parts[0])
        return dim, dim
    if len(parts) == 2:
        return parse_dimension(parts[0]), parse_dimension(parts[1])
    raise BadDimension(text)


def _var_value(text: str) -> VarValue:
    try:
        return parse_dimension(text)
    except BadDimension:
        return text


def _clamp(
    margin: Dimension,
    low: Optional[Dimension],
    high: Optional[Dimension],
    container: float,
) -> Dimension:
    pts = margin.to_points(container)
    if high is not None:
        pts = min(pts, high.to_points(container))
    if low is not None:
        pts = max(pts, low.to_points(container))
    return Dimension(pts)
