"""Caption composition, line breaking and placement on a monospaced grid.

One cell is one character column.  Lengths convert to cells at a fixed
6pt per cell; see ``CellMetrics``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import repeat
from typing import Callable, Mapping, Optional, Sequence

from .diagnostics import CaptionError
from .optparse import Dimension
from .registry import Registries
from .settings import CaptionSettings
from .template import (
    NBSP,
    BoxMark,
    BreakMark,
    FillMark,
    LlapMark,
    ParMark,
    SpaceMark,
    Span,
    Styled,
    VarEnv,
    VarValue,
    add_attrs,
    eval_template,
    parse_template,
)


class WordTooWide(CaptionError):
    code = "word-too-wide"

    def __init__(self, word: str, width: int) -> None:
        self.word = word
        self.width = width
        super().__init__(word=word, width=width)


class LabelsepIncompatible(CaptionError):
    code = "labelsep-hang"

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(name=name)


def round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


@dataclass(frozen=True)
class CellMetrics:
    cells_per_line: int = 72
    points_per_cell: float = 6.0

    @property
    def container_points(self) -> float:
        return self.cells_per_line * self.points_per_cell

    def cells(self, dim: Dimension) -> int:
        exact = dim.points / self.points_per_cell + (dim.relative or 0.0) * self.cells_per_line
        return round_half_away(exact)


# ---------------------------------------------------------------- composition


@dataclass(frozen=True)
class HangLabel:
    """Label and separator glued together so hang layout can measure them."""

    content: Styled


@dataclass(frozen=True)
class ComposedCaption:
    label: Styled
    separator: Styled
    text_paragraphs: tuple[Styled, ...]
    format: str
    body: tuple[Styled, ...]  # format output split at paragraph ends
    hang_width: int = 0
    vertical: bool = False


def _blank(s: Styled) -> bool:
    return all(isinstance(p, Span) and not p.text.strip(" " + NBSP) for p in s)


def _split_paragraphs(s: Styled) -> list[Styled]:
    paras: list[list] = [[]]
    for p in s:
        if isinstance(p, ParMark):
            paras.append([])
        else:
            paras[-1].append(p)
    return [tuple(p) for p in paras]


def heading_styled(heading: str | Sequence[str], env: VarEnv | None = None) -> Styled:
    """Parse heading text; ``\\par`` separates paragraphs, a list gives them directly."""
    if not isinstance(heading, str):
        heading = "\\par ".join(heading)
    env = env or VarEnv()
    return eval_template(parse_template(heading, 0, tuple(env.values)), (), env)


def compose(
    settings: CaptionSettings,
    registries: Registries,
    float_name: str,
    number: str,
    heading: str | Sequence[str] | Styled,
    *,
    starred: bool = False,
    env: Mapping[str, VarValue] | None = None,
    metrics: CellMetrics | None = None,
) -> ComposedCaption:
    metrics = metrics or CellMetrics()
    values = {**settings.vars, **(env or {})}
    venv = VarEnv(values)
    fmt = registries.lookup("format", settings.format)
    sep_entry = registries.lookup("labelsep", settings.labelsep)
    if fmt.hang and sep_entry.breaks_line:
        raise LabelsepIncompatible(settings.labelsep)

    if isinstance(heading, tuple) and all(not isinstance(p, str) for p in heading):
        text = heading
    else:
        text = heading_styled(heading, venv)

    base = settings.font
    label_attrs = base.merge(settings.labelfont).attrs()
    text_attrs = base.merge(settings.textfont).attrs()

    if starred:
        label: Styled = ()
    else:
        label_tpl = registries.lookup("labelformat", settings.labelformat)
        label = add_attrs(eval_template(label_tpl, (float_name, number), venv), label_attrs)
    if _blank(label) or _blank(text):
        label = () if _blank(label) else label
        sep: Styled = ()
    else:
        sep_attrs = base.attrs() if sep_entry.starred else label_attrs
        sep = add_attrs(eval_template(sep_entry.template, (), venv), sep_attrs)
    if _blank(text):
        text_out: Styled = ()
    else:
        text_tpl = registries.lookup("textformat", settings.textformat)
        text_out = add_attrs(eval_template(text_tpl, (text,), venv), text_attrs)

    hang_width = 0
    if fmt.hang and (label or sep):
        glued = label + sep
        hang_width = len(_flatten(glued, metrics))
        args: tuple = ((HangLabel(glued),), (), text_out)
    else:
        args = (label, sep, text_out)
    body = eval_template(fmt.template, args, venv)
    body = add_attrs(body, base.attrs())
    paragraphs = tuple(p for p in _split_paragraphs(body) if not _blank(p) or _has_marks(p))
    return ComposedCaption(
        label=label,
        separator=sep,
        text_paragraphs=tuple(_split_paragraphs(text_out)) if text_out else (),
        format=settings.format,
        body=paragraphs,
        hang_width=hang_width,
        vertical=fmt.vertical,
    )


def _has_marks(p: Styled) -> bool:
    return any(isinstance(x, (LlapMark, BoxMark, HangLabel)) for x in p)


# ---------------------------------------------------------------- elements

Cell = tuple  # (char, attrs)


@dataclass(frozen=True, slots=True)
class _Glue:
    width: int
    kind: str  # "space", "fill" or "fixed"
    starred: bool = False
    attrs: tuple = ()


@dataclass(slots=True)
class _Llap:
    cells: list


@dataclass(slots=True)
class _Atom:
    parts: list = field(default_factory=list)  # (text, attrs) runs or _Llap
    width: int = 0  # set once the atom is complete

    @property
    def lead_llap(self) -> int:
        if self.parts and isinstance(self.parts[0], _Llap):
            return len(self.parts[0].cells)
        return 0

    def text(self) -> str:
        return "".join([p[0] for p in self.parts if type(p) is tuple])


class _Break:
    pass


def _flatten(s: Styled, metrics: CellMetrics) -> list:
    """Render a styled string to cells, ignoring breakability."""
    out: list = []
    for p in s:
        if isinstance(p, Span):
            out.extend((" " if c == NBSP else c, p.attrs) for c in p.text)
        elif isinstance(p, SpaceMark):
            out.extend((" ", ()) for _ in range(max(0, metrics.cells(p.width))))
        elif isinstance(p, BoxMark):
            out.extend(_box(p, metrics))
        elif isinstance(p, HangLabel):
            out.extend(_flatten(p.content, metrics))
        # fills, breaks and nested llaps occupy no cells here
    return out


def _box(p: BoxMark, metrics: CellMetrics) -> list:
    inner = _flatten(p.content, metrics)
    width = metrics.cells(p.width)
    slack = width - len(inner)
    if slack <= 0:
        return inner
    pad = [(" ", ())]
    if p.align == "l":
        return inner + pad * slack
    if p.align == "r":
        return pad * slack + inner
    return pad * (slack // 2) + inner + pad * (slack - slack // 2)


def _elements(s: Styled, metrics: CellMetrics) -> list:
    elems: list = []
    atom: Optional[_Atom] = None

    def cur() -> _Atom:
        nonlocal atom
        if atom is None:
            atom = _Atom()
            elems.append(atom)
        return atom

    def add_cells(cells: list) -> None:
        a = cur()
        a.parts.extend(cells)
        a.width += len(cells)

    for p in s:
        if isinstance(p, Span):
            attrs = p.attrs
            space = _Glue(1, "space", attrs=attrs)
            for i, word in enumerate(p.text.split(" ")):
                if i:
                    atom = None
                    last = elems[-1] if elems else None
                    if not (type(last) is _Glue and last.kind == "space"):
                        elems.append(space)
                if word:
                    run = (word.replace(NBSP, " "), attrs)
                    if atom is None:
                        atom = _Atom([run], len(word))
                        elems.append(atom)
                    else:
                        atom.parts.append(run)
                        atom.width += len(word)
        elif isinstance(p, FillMark):
            atom = None
            elems.append(_Glue(0, "fill"))
        elif isinstance(p, SpaceMark):
            atom = None
            elems.append(_Glue(metrics.cells(p.width), "fixed", p.starred))
        elif isinstance(p, BreakMark):
            atom = None
            elems.append(_Break())
        elif isinstance(p, LlapMark):
            cur().parts.append(_Llap(_flatten(p.content, metrics)))
        elif isinstance(p, BoxMark):
            add_cells(_box(p, metrics))
        elif isinstance(p, HangLabel):
            add_cells(_flatten(p.content, metrics))
    return elems


# ---------------------------------------------------------------- breaking


@dataclass
class _RawLine:
    items: list
    indent: int
    forced: bool


def _break(
    elems: list,
    indent_for: Callable[[int], int],
    usable: int,
    left: int,
) -> list[_RawLine]:
    lines: list[_RawLine] = []
    cur: list = []
    pending: list = []
    width = 0

    def open_line(first: Optional[_Atom]) -> tuple[int, int]:
        indent = indent_for(len(lines))
        if first is not None and first.lead_llap > left + indent:
            indent = min(first.lead_llap - left, usable - 1)
        return indent, usable - indent

    # Fixed spaces survive at a line start after a forced break, or when starred.
    after_break = False
    gap = 0  # total width of the pending glue
    indent, avail = open_line(None)
    for el in elems:
        kind = type(el)
        if kind is _Glue:
            if cur or (el.kind == "fixed" and (el.starred or after_break)):
                pending.append(el)
                gap += el.width
        elif kind is _Break:
            lines.append(_RawLine(cur, indent, True))
            cur, pending, width, gap = [], [], 0, 0
            indent, avail = open_line(None)
            after_break = True
        elif not cur:
            indent, avail = open_line(el)
            if gap + el.width > avail:
                raise WordTooWide(el.text(), avail)
            pending.append(el)
            cur, width, pending, gap = pending, gap + el.width, [], 0
            after_break = False
        else:
            if width + gap + el.width <= avail:
                cur.extend(pending)
                cur.append(el)
                width += gap + el.width
            else:
                lines.append(_RawLine(cur, indent, False))
                indent, avail = open_line(el)
                if el.width > avail:
                    raise WordTooWide(el.text(), avail)
                cur, width = [el], el.width
            pending, gap = [], 0
    if cur:
        lines.append(_RawLine(cur, indent, False))
    return lines


# ---------------------------------------------------------------- placement


@dataclass(frozen=True)
class Line:
    column: int  # absolute cell of the first character
    cells: tuple = ()  # (char, attrs) pairs

    @property
    def text(self) -> str:
        return "".join(c for c, _ in self.cells)

    @property
    def end(self) -> int:
        return self.column + len(self.cells)

    def spans(self) -> list[tuple[str, tuple]]:
        out: list[tuple[str, tuple]] = []
        for ch, attrs in self.cells:
            if out and out[-1][1] == attrs:
                out[-1] = (out[-1][0] + ch, attrs)
            else:
                out.append((ch, attrs))
        return out


BLANK = Line(0, ())


def _distribute(slack: int, n: int) -> list[int]:
    q, r = divmod(slack, n)
    return [q + (1 if i < r else 0) for i in range(n)]


def _place(raw: _RawLine, mode: str, first: bool, last: bool, usable: int, left: int) -> Line:
    items = raw.items
    while items and isinstance(items[-1], _Glue):
        items = items[:-1]
    natural = sum(i.width for i in items)
    avail = usable - raw.indent
    slack = max(0, avail - natural)
    final = last or raw.forced
    extra: dict[int, int] = {}
    offset = 0

    fills = [k for k, i in enumerate(items) if isinstance(i, _Glue) and i.kind == "fill"]
    gaps = [k for k, i in enumerate(items) if isinstance(i, _Glue) and i.kind == "space"]

    def justify() -> None:
        if gaps:
            extra.update(zip(gaps, _distribute(slack, len(gaps))))

    if fills:
        q, r = divmod(slack, len(fills))
        extra.update({k: q for k in fills})
        extra[fills[0]] += r
    elif mode == "centering":
        offset = slack // 2
    elif mode == "raggedleft":
        offset = slack
    elif mode == "justified":
        if not final:
            justify()
    elif mode == "centerlast":
        if final:
            offset = slack // 2
        else:
            justify()
    elif mode == "centerfirst":
        if first:
            offset = slack // 2
        elif not raw.forced:
            justify()
    # raggedright: flush left

    start = left + raw.indent + offset
    cells: list[Cell] = []
    overlays: list[tuple[int, list]] = []  # (column where the llap ends, its cells)
    for k, item in enumerate(items):
        if isinstance(item, _Glue):
            attrs = item.attrs if item.kind == "space" else ()
            cells.extend([(" ", attrs)] * (item.width + extra.get(k, 0)))
            continue
        for part in item.parts:
            if type(part) is _Llap:
                overlays.append((start + len(cells), part.cells))
            else:
                text, attrs = part
                cells.extend(zip(text, repeat(attrs)))
    if not overlays:
        return Line(start, tuple(cells))

    grid: dict[int, Cell] = {start + i: c for i, c in enumerate(cells)}
    for end, lap in overlays:
        for j, cell in enumerate(lap):
            col = end - len(lap) + j
            if col >= 0:
                grid[col] = cell
    if not grid:
        return Line(start, ())
    lo, hi = min(grid), max(grid)
    return Line(lo, tuple(grid.get(c, (" ", ())) for c in range(lo, hi + 1)))


# ---------------------------------------------------------------- boxes


@dataclass(frozen=True)
class LayoutBox:
    lines: tuple[Line, ...]
    skip_above: int = 0
    skip_below: int = 0
    left: int = 0  # margin in cells
    usable: int = 72

    @property
    def right_edge(self) -> int:
        return self.left + self.usable

    def text_lines(self) -> list[Line]:
        return [ln for ln in self.lines if ln.cells]


EMPTY_BOX = LayoutBox(())


def frame(settings: CaptionSettings, metrics: CellMetrics) -> tuple[int, int]:
    """Left margin and usable width in cells."""
    total = metrics.cells_per_line
    if settings.width is not None:
        usable = min(total, max(1, metrics.cells(settings.width)))
        return (total - usable) // 2, usable
    left = max(0, metrics.cells(settings.margin_left))
    right = max(0, metrics.cells(settings.margin_right))
    usable = max(1, total - left - right)
    return min(left, total - 1), usable


def break_paragraph(
    text: str,
    justification: str,
    usable_cells: int,
    first_indent: int = 0,
    hang_indent: int = 0,
) -> list[Line]:
    """Break plain text into placed lines; columns are relative to the text block."""
    raws = _plain_raw_lines(text, usable_cells, first_indent, hang_indent)
    return [
        _place(r, justification, k == 0, k == len(raws) - 1, usable_cells, 0)
        for k, r in enumerate(raws)
    ]


def break_lines(text: str, usable_cells: int, first_indent: int = 0, hang_indent: int = 0) -> list[list[str]]:
    """The words chosen for each line, before any placement."""
    return [
        [item.text() for item in raw.items if type(item) is _Atom]
        for raw in _plain_raw_lines(text, usable_cells, first_indent, hang_indent)
    ]


def _plain_raw_lines(text: str, usable_cells: int, first_indent: int, hang_indent: int) -> list[_RawLine]:
    elems = _elements((Span(text),) if text else (), _PLAIN_METRICS)
    first = _clamp_indent(first_indent, 0, usable_cells)
    rest = _clamp_indent(hang_indent, 0, usable_cells)
    return _break(elems, lambda k: rest if k else first, usable_cells, 0)


# plain text has no dimensions to convert, so any metrics will do
_PLAIN_METRICS = CellMetrics()


def _clamp_indent(value: int, left: int, usable: int) -> int:
    return max(-left, min(usable - 1, value))


def natural_width(paragraph: Styled, metrics: CellMetrics) -> Optional[int]:
    """One-line width of a paragraph, or None if it contains a forced break."""
    elems = _elements(paragraph, metrics)
    if any(isinstance(e, _Break) for e in elems):
        return None
    while elems and isinstance(elems[0], _Glue) and not elems[0].starred:
        elems.pop(0)
    while elems and isinstance(elems[-1], _Glue):
        elems.pop()
    return sum(e.width for e in elems)


def single_line_check(composed: ComposedCaption, settings: CaptionSettings, metrics: CellMetrics) -> bool:
    if not settings.singlelinecheck or len(composed.body) != 1:
        return False
    width = natural_width(composed.body[0], metrics)
    if width is None:
        return False
    _, usable = frame(settings, metrics)
    return width <= usable


def layout_caption(
    composed: ComposedCaption,
    settings: CaptionSettings,
    metrics: CellMetrics,
    position: Optional[str] = None,
    registries: Registries | None = None,
) -> LayoutBox:
    left, usable = frame(settings, metrics)
    hang = composed.hang_width
    indention = 0 if composed.vertical else metrics.cells(settings.indention)
    hangindent = metrics.cells(settings.hangindent)
    parindent = metrics.cells(settings.parindent)
    parskip = max(0, metrics.cells(settings.parskip))
    mode = settings.justification
    if registries is not None:
        mode = registries.lookup("justification", mode)

    lines: list[Line] = []
    for pi, para in enumerate(composed.body):
        if pi:
            lines.extend([BLANK] * parskip)

        def indent_for(k: int, pi: int = pi) -> int:
            if pi == 0:
                value = 0 if k == 0 else hang + indention + hangindent
            else:
                value = hang + parindent if k == 0 else hang + hangindent
            return _clamp_indent(value, left, usable)

        raws = _break(_elements(para, metrics), indent_for, usable, left)
        for k, raw in enumerate(raws):
            lines.append(_place(raw, mode, k == 0, k == len(raws) - 1, usable, left))

    if not lines:
        return LayoutBox((), 0, 0, left, usable)
    skip = max(0, metrics.cells(settings.skip))
    where = position if position is not None else settings.position
    if where == "top":
        return LayoutBox(tuple(lines), 0, skip, left, usable)
    return LayoutBox(tuple(lines), skip, 0, left, usable)


def typeset(
    settings: CaptionSettings,
    registries: Registries,
    float_name: str,
    number: str,
    heading,
    metrics: CellMetrics | None = None,
    *,
    starred: bool = False,
    env: Mapping[str, VarValue] | None = None,
    position: Optional[str] = None,
) -> LayoutBox:
    """Compose, apply the single-line check, and lay out one caption."""
    metrics = metrics or CellMetrics()
    composed = compose(settings, registries, float_name, number, heading, starred=starred, env=env, metrics=metrics)
    active = settings
    if single_line_check(composed, settings, metrics) and settings.singleline is not None:
        active = settings.singleline
        composed = compose(active, registries, float_name, number, heading, starred=starred, env=env, metrics=metrics)
    return layout_caption(composed, active, metrics, position, registries)
