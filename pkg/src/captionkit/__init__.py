"""Caption layout on a monospaced cell grid, driven by a keyval option language."""

from .diagnostics import CATALOG, CaptionError, Diagnostic, Severity
from .document import Document
from .layout import CellMetrics, LayoutBox, break_lines, break_paragraph, compose, layout_caption, single_line_check, typeset
from .optparse import Dimension, OptionList, parse_bool, parse_dimension, parse_option_list
from .registry import FontSpec, Registries, builtin_registries
from .scenario import render_box, run_scenario
from .settings import LEGACY_TABLE, CaptionSettings, Context, SettingsStore, map_legacy

__all__ = [
    "CATALOG",
    "CaptionError",
    "CaptionSettings",
    "CellMetrics",
    "Context",
    "Diagnostic",
    "Dimension",
    "Document",
    "FontSpec",
    "LEGACY_TABLE",
    "LayoutBox",
    "OptionList",
    "Registries",
    "SettingsStore",
    "Severity",
    "break_lines",
    "break_paragraph",
    "builtin_registries",
    "compose",
    "layout_caption",
    "map_legacy",
    "parse_bool",
    "parse_dimension",
    "parse_option_list",
    "render_box",
    "run_scenario",
    "single_line_check",
    "typeset",
]
