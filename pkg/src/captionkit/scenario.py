"""Line-oriented scenario files that drive a document session.

Each non-blank line is one directive: a verb followed by shell-quoted
arguments.  Lines whose first non-blank character is ``#`` are comments.
"""

from __future__ import annotations

import dataclasses
import shlex
from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import CaptionError, Diagnostic, ScenarioSyntaxError, Severity
from .document import Document
from .layout import CellMetrics, LayoutBox
from .optparse import parse_option_list

# verb -> (min args, max args, starred form allowed)
VERBS: dict[str, tuple[int, int, bool]] = {
    "width": (1, 1, False),
    "page": (1, 1, False),
    "class": (1, 1, False),
    "usepackage": (0, 1, False),
    "setup": (1, 2, True),
    "clearsetup": (1, 2, True),
    "showsetup": (0, 1, False),
    "declare-format": (2, 2, True),
    "declare-labelformat": (2, 2, False),
    "declare-textformat": (2, 2, False),
    "declare-labelsep": (2, 2, True),
    "declare-justification": (2, 2, False),
    "declare-font": (2, 2, False),
    "declare-listformat": (2, 2, False),
    "declare-option": (1, 2, False),
    "declare-style": (2, 3, False),
    "declare-type": (1, 4, False),
    "begin": (0, 1, False),
    "end": (0, 0, False),
    "content": (0, 0, False),
    "caption": (1, 2, True),
    "captionof": (2, 3, True),
    "captionlistentry": (2, 2, False),
    "continued": (0, 0, False),
    "step": (1, 1, False),
    "listof": (1, 1, False),
}


@dataclass(frozen=True)
class Directive:
    line: int
    verb: str
    args: tuple[str, ...]
    starred: bool = False


def _syntax(line: int, detail: str) -> ScenarioSyntaxError:
    err = ScenarioSyntaxError(detail=detail)
    err.diagnostic = dataclasses.replace(err.diagnostic, line=line)
    return err


def parse_scenario(text: str) -> list[Directive]:
    directives = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lexer = shlex.shlex(stripped, posix=True)
        lexer.whitespace_split = True
        lexer.commenters = ""
        lexer.escape = ""
        try:
            words = list(lexer)
        except ValueError as exc:
            raise _syntax(number, str(exc).lower()) from None
        head, args = words[0], tuple(words[1:])
        starred = head.endswith("*")
        verb = head.rstrip("*")
        if verb not in VERBS:
            raise _syntax(number, f"unknown directive `{head}'")
        low, high, star_ok = VERBS[verb]
        if starred and not star_ok:
            raise _syntax(number, f"`{verb}' has no starred form")
        if not low <= len(args) <= high:
            raise _syntax(number, f"`{verb}' takes {low}..{high} arguments, got {len(args)}")
        if verb in ("width", "page") and not (args[0].isdigit() and int(args[0]) > 0):
            raise _syntax(number, f"`{verb}' needs a positive integer")
        if verb == "class" and args[0] not in ("oneside", "twoside"):
            raise _syntax(number, "`class' takes oneside or twoside")
        directives.append(Directive(number, verb, args, starred))
    return directives


def render_box(box: LayoutBox, width: int = 72, annotated: bool = False) -> str:
    """Text grid for one caption; skips become blank rows."""
    if not box.lines:
        return ""
    rows = [""] * box.skip_above
    for line in box.lines:
        if annotated:
            body = "".join(f"«{','.join(a)}:{t}»" if a else t for t, a in line.spans())
        else:
            body = line.text
        rows.append((" " * line.column + body).rstrip() if line.cells else "")
    rows.extend([""] * box.skip_below)
    return "\n".join(rows) + "\n"


@dataclass
class RunResult:
    output: str
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def errors(self) -> int:
        return sum(d.severity is Severity.ERROR for d in self.diagnostics)

    @property
    def warnings(self) -> int:
        return sum(d.severity is Severity.WARNING for d in self.diagnostics)

    def exit_status(self, strict: bool = False) -> int:
        return 1 if self.errors or (strict and self.warnings) else 0


class Runner:
    def __init__(self, width: int = 72, annotated: bool = False) -> None:
        self.doc = Document(metrics=CellMetrics(width))
        self.annotated = annotated
        self.chunks: list[str] = []
        self.diagnostics: list[Diagnostic] = []

    def run(self, directives: list[Directive]) -> RunResult:
        for d in directives:
            try:
                found = self.execute(d)
            except CaptionError as exc:
                found = [exc.diagnostic]
            self.diagnostics.extend(dataclasses.replace(x, line=d.line) for x in found)
        self.diagnostics.extend(self.doc.finish())
        return RunResult("".join(self.chunks), self.diagnostics)

    def _box(self, box: LayoutBox) -> None:
        self.chunks.append(render_box(box, self.doc.metrics.cells_per_line, self.annotated))

    def execute(self, d: Directive) -> list[Diagnostic]:
        doc, reg, a = self.doc, self.doc.registries, d.args
        verb = d.verb
        if verb == "width":
            doc.metrics = CellMetrics(int(a[0]))
        elif verb == "page":
            doc.page = int(a[0])
        elif verb == "class":
            doc.sidedness = a[0]
        elif verb == "usepackage":
            return doc.store.setup("package", a[0] if a else "")
        elif verb == "setup":
            if len(a) == 2:
                return doc.setup(a[1], float_type=a[0], starred=d.starred)
            return doc.setup(a[0], starred=d.starred)
        elif verb == "clearsetup":
            keys = [k.strip() for k in a[0].split(",") if k.strip()] if len(a) == 2 else None
            return doc.store.clear_setup(a[-1], keys, d.starred)
        elif verb == "showsetup":
            scope = f"type:{a[0]}" if a else "global"
            self.chunks.append(doc.store.show_setup(scope) + "\n")
        elif verb == "declare-format":
            reg.declare_format(a[0], a[1], vertical=d.starred)
        elif verb == "declare-labelformat":
            reg.declare_label_format(a[0], a[1])
        elif verb == "declare-textformat":
            reg.declare_text_format(a[0], a[1])
        elif verb == "declare-labelsep":
            reg.declare_label_separator(a[0], a[1], starred=d.starred)
        elif verb == "declare-justification":
            reg.declare_justification(a[0], a[1])
        elif verb == "declare-font":
            reg.declare_font(a[0], a[1])
        elif verb == "declare-listformat":
            reg.declare_list_format(a[0], a[1])
        elif verb == "declare-option":
            reg.declare_option(a[0], a[1] if len(a) > 1 else None)
        elif verb == "declare-style":
            if len(a) == 3:
                reg.declare_style(a[0], a[2], a[1])
            else:
                reg.declare_style(a[0], a[1])
        elif verb == "declare-type":
            self._declare_type(d)
        elif verb == "begin":
            doc.begin_float(a[0] if a else None)
        elif verb == "end":
            doc.end_float()
        elif verb == "content":
            doc.mark_content()
        elif verb == "caption":
            entry: Optional[str] = a[0] if len(a) == 2 else None
            self._box(doc.caption(a[-1], entry, d.starred).box)
        elif verb == "captionof":
            entry = a[1] if len(a) == 3 else None
            self._box(doc.caption_of(a[0], a[-1], entry, d.starred).box)
        elif verb == "captionlistentry":
            doc.caption_list_entry(a[0], a[1])
        elif verb == "continued":
            doc.continued_float()
        elif verb == "step":
            doc.step_counter(a[0])
        elif verb == "listof":
            self.chunks.append("\n".join(doc.list_of(a[0])) + "\n")
        return []

    def _declare_type(self, d: Directive) -> None:
        args = list(d.args)
        options = None
        if args[0].startswith("[") and args[0].endswith("]"):
            options = parse_option_list(args.pop(0)[1:-1])
        if not args or len(args) > 3:
            raise _syntax(d.line, "`declare-type' needs a type name")
        name = args[0]
        display = args[1] if len(args) > 1 else None
        heading = args[2] if len(args) > 2 else None
        self.doc.declare_type(name, display, heading, options=options)


def run_scenario(text: str, width: int = 72, annotated: bool = False) -> RunResult:
    """Parse and execute a scenario; raises ScenarioSyntaxError on malformed input."""
    return Runner(width, annotated).run(parse_scenario(text))
