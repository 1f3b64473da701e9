"""Float types, counters, caption commands and lists of floats."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import diagnostics as diag
from .diagnostics import CaptionError, Diagnostic, UnknownOption
from .layout import CellMetrics, LayoutBox, heading_styled, typeset
from .optparse import OptionList, parse_option_list
from .registry import Registries
from .settings import CaptionSettings, Context, NoFloatType, Scope, SettingsStore
from .template import VarEnv, eval_template, plain_text


class CaptionOutsideFloat(CaptionError):
    code = "caption-outside-float"


class ContinuedOutsideFloat(CaptionError):
    code = "continued-outside-float"


class ContinuedAfterOther(CaptionError):
    code = "continued-after"


class NestedFloat(CaptionError):
    code = "nested-float"


class EndWithoutBegin(CaptionError):
    code = "end-without-begin"


# Sectioning counters reset their children when stepped.
COUNTER_PARENTS = {"section": "chapter", "subsection": "section", "subsubsection": "subsection"}


def arabic_number(within_value: Optional[int], counter: int) -> str:
    if within_value is None:
        return str(counter)
    return f"{within_value}.{counter}"


@dataclass(frozen=True)
class ListEntry:
    number: str
    text: str
    suppressed: bool = False


@dataclass
class FloatType:
    name: str
    display_name: str
    list_heading: str
    within: str = "none"
    counter: int = 0
    parent_snapshot: Optional[tuple[str, int]] = None  # (within counter, its generation)
    list_entries: list[ListEntry] = field(default_factory=list)
    last_number: Optional[str] = None


@dataclass
class FloatContext:
    type: Optional[str]  # None for a plain group
    scope: Scope
    continued: bool = False
    captions_emitted: int = 0
    content_seen: bool = False
    number: Optional[str] = None


@dataclass(frozen=True)
class CaptionResult:
    box: LayoutBox
    number: Optional[str]
    type: str


class Document:
    def __init__(
        self,
        registries: Registries | None = None,
        metrics: CellMetrics | None = None,
        sidedness: str = "oneside",
        number_format: Callable[[Optional[int], int], str] = arabic_number,
    ) -> None:
        self.store = SettingsStore(registries)
        self.metrics = metrics or CellMetrics()
        self.sidedness = sidedness
        self.page = 1
        self.number_format = number_format
        self.types: dict[str, FloatType] = {
            "figure": FloatType("figure", "Figure", "List of Figures"),
            "table": FloatType("table", "Table", "List of Tables"),
        }
        self.counters: dict[str, int] = {}
        self.generations: dict[str, int] = {}
        self.stack: list[FloatContext] = []
        self.last_float_type: Optional[str] = None

    @property
    def registries(self) -> Registries:
        return self.store.registries

    def context(self) -> Context:
        return Context(self.page, self.sidedness, self.metrics.container_points)

    # -- declarations

    def declare_type(
        self,
        name: str,
        display_name: Optional[str] = None,
        list_heading: Optional[str] = None,
        within: str = "none",
        options: OptionList | str | None = None,
    ) -> FloatType:
        if isinstance(options, str):
            options = parse_option_list(options)
        for key, value in options or ():
            if key == "within":
                within = str(value)
            elif key == "without":
                within = "none"
            elif key == "name":
                display_name = str(value)
            elif key == "listname":
                list_heading = str(value)
            elif key not in ("fileext", "placement"):
                raise UnknownOption(name=key)
        display = display_name or name[:1].upper() + name[1:]
        heading = list_heading or f"List of {display}s"
        ftype = FloatType(name, display, heading, within)
        self.types[name] = ftype
        self.store.declare_type(name, display, heading, within)
        return ftype

    # -- counters

    def step_counter(self, name: str) -> int:
        self.counters[name] = self.counters.get(name, 0) + 1
        self.generations[name] = self.generations.get(name, 0) + 1
        for child, parent in COUNTER_PARENTS.items():
            if parent == name and self.counters.get(child):
                self.counters[child] = 0
                self.generations[child] = self.generations.get(child, 0) + 1
        return self.counters[name]

    step_section_counter = step_counter

    def _step_float(self, ftype: FloatType, within: str) -> str:
        if within != "none":
            snapshot = (within, self.generations.get(within, 0))
            if ftype.parent_snapshot != snapshot:
                ftype.counter = 0
                ftype.parent_snapshot = snapshot
        ftype.counter += 1
        ftype.last_number = self._format(ftype, within)
        return ftype.last_number

    def _format(self, ftype: FloatType, within: str) -> str:
        parent = None if within == "none" else self.counters.get(within, 0)
        return self.number_format(parent, ftype.counter)

    # -- setup

    def setup(self, opts: OptionList | str, float_type: Optional[str] = None, starred: bool = False) -> list[Diagnostic]:
        if float_type is not None:
            return self.store.setup(f"type:{float_type}", opts, starred)
        if self.stack:
            return self.store.setup(self.stack[-1].scope, opts, starred)
        return self.store.setup("global", opts, starred)

    def _local(self) -> OptionList:
        local = OptionList()
        for ctx in self.stack:
            local = local + ctx.scope.options
        return local

    def resolve(self, float_type: Optional[str], extra: OptionList | None = None, consume: bool = True) -> CaptionSettings:
        local = self._local() + (extra or OptionList())
        return self.store.resolve(float_type, local, self.context(), consume)

    # -- floats

    def begin_float(self, float_type: Optional[str] = None) -> None:
        if float_type is not None:
            if float_type not in self.types:
                raise NoFloatType(type=float_type)
            outer = next((c.type for c in reversed(self.stack) if c.type), None)
            if outer is not None:
                raise NestedFloat(type=float_type, outer=outer)
        self.stack.append(FloatContext(float_type, Scope("local")))

    def mark_content(self) -> None:
        if self.stack:
            self.stack[-1].content_seen = True

    def end_float(self) -> None:
        if not self.stack:
            raise EndWithoutBegin()
        _, ftype = self._current()
        ctx = self.stack.pop()
        if ctx.type is not None or ctx.captions_emitted:
            self.last_float_type = ftype

    def _group_type(self) -> Optional[str]:
        return self.resolve(None, consume=False).type

    def _current(self) -> tuple[Optional[FloatContext], Optional[str]]:
        """Innermost context and the float type in effect there."""
        if not self.stack:
            return None, None
        ctx = self.stack[-1]
        typed = next((c.type for c in reversed(self.stack) if c.type), None)
        return ctx, typed or self._group_type()

    def continued_float(self) -> None:
        ctx, ftype = self._current()
        if ctx is None or ftype is None:
            raise ContinuedOutsideFloat()
        previous = self.last_float_type
        if previous is not None and previous != ftype:
            raise ContinuedAfterOther(type=ftype, other=previous)
        ctx.continued = True
        ctx.number = self.types[ftype].last_number

    # -- captions

    def _env(self, current: Optional[str], settings: CaptionSettings) -> dict[str, str]:
        env: dict[str, str] = {}
        for name, ftype in self.types.items():
            env[f"{name}name"] = settings.names.get(name, ftype.display_name)
            env[f"list{name}name"] = settings.list_names.get(name, ftype.list_heading)
            env[f"the{name}"] = self._format(ftype, settings.within.get(name, ftype.within))
        for counter, value in self.counters.items():
            env.setdefault(f"the{counter}", str(value))
        if current is not None:
            env[f"{current}name"] = settings.display_name(current)
        return env

    def caption(
        self,
        heading: str | Sequence[str],
        list_entry: Optional[str] = None,
        starred: bool = False,
    ) -> CaptionResult:
        ctx, ftype = self._current()
        if ctx is None or ftype is None:
            raise CaptionOutsideFloat()
        if ftype not in self.types:
            raise NoFloatType(type=ftype)
        settings = self.resolve(ftype)
        position = settings.position
        if position == "auto":
            position = "bottom" if ctx.content_seen else "top"
        number = None
        if not starred:
            if ctx.number is None:
                ctx.number = self._step_float(self.types[ftype], settings.within.get(ftype, "none"))
            number = ctx.number
        ctx.captions_emitted += 1
        return self._emit(ftype, settings, heading, list_entry, starred, number, position)

    def caption_of(
        self,
        float_type: str,
        heading: str | Sequence[str],
        list_entry: Optional[str] = None,
        starred: bool = False,
    ) -> CaptionResult:
        if float_type not in self.types:
            raise NoFloatType(type=float_type)
        settings = self.resolve(float_type)
        position = settings.position
        if position == "auto":
            position = "bottom" if not self.stack or self.stack[-1].content_seen else "top"
        number = None
        if not starred:
            number = self._step_float(self.types[float_type], settings.within.get(float_type, "none"))
        return self._emit(float_type, settings, heading, list_entry, starred, number, position)

    def _emit(
        self,
        ftype: str,
        settings: CaptionSettings,
        heading,
        list_entry: Optional[str],
        starred: bool,
        number: Optional[str],
        position: str,
    ) -> CaptionResult:
        env = self._env(ftype, settings)
        box = typeset(
            settings,
            self.registries,
            settings.display_name(ftype),
            number or "",
            heading,
            self.metrics,
            starred=starred,
            env=env,
            position=position,
        )
        if not starred and number is not None:
            text = self._list_text(heading if list_entry is None else list_entry, settings, env)
            entry = ListEntry(number, text, suppressed=list_entry == "")
            if settings.list:
                self.types[ftype].list_entries.append(entry)
        return CaptionResult(box, number, ftype)

    def _list_text(self, heading, settings: CaptionSettings, env: dict[str, str]) -> str:
        text = plain_text(heading_styled(heading, VarEnv({**settings.vars, **env})))
        return " ".join(text.split())

    def caption_list_entry(self, float_type: str, text: str) -> str:
        if float_type not in self.types:
            raise NoFloatType(type=float_type)
        settings = self.resolve(float_type, consume=False)
        ftype = self.types[float_type]
        number = self._step_float(ftype, settings.within.get(float_type, "none"))
        if settings.list:
            ftype.list_entries.append(ListEntry(number, self._list_text(text, settings, self._env(float_type, settings))))
        return number

    # -- output

    def list_of(self, float_type: str) -> list[str]:
        if float_type not in self.types:
            raise NoFloatType(type=float_type)
        settings = self.store.resolve(float_type, None, self.context(), consume=False)
        template = self.registries.lookup("listformat", settings.listformat)
        lines = [settings.list_names.get(float_type, self.types[float_type].list_heading)]
        for entry in self.types[float_type].list_entries:
            if entry.suppressed:
                continue
            label = plain_text(eval_template(template, ("", entry.number), VarEnv()))
            lines.append(f"{label}  {entry.text}")
        return lines

    def finish(self) -> list[Diagnostic]:
        found = [diag.make("unclosed-float", type=c.type or "group") for c in self.stack]
        return found + self.store.unused_setups()

