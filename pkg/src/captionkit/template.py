"""The template mini-language used by all declaration commands.

A declaration body such as ``#1#2\\\\#3`` or ``(\\textbf{#2})`` is parsed into a
tuple of tokens from a closed set.  Evaluating a template substitutes its
arguments and produces a *styled string*: a tuple of pieces that are either
plain text spans (with font attributes) or layout markers that the layout
module resolves into cells.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .diagnostics import CaptionError
from .optparse import BadDimension, Dimension, parse_dimension

NBSP = "\u00a0"


class TemplateSyntaxError(CaptionError):
    code = "template-syntax"

    def __init__(self, detail: str) -> None:
        self.detail = detail
        super().__init__(detail=detail)


class UnboundVariable(CaptionError):
    code = "unbound-variable"

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(name=name)


# ---------------------------------------------------------------- tokens


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Param:
    index: int


@dataclass(frozen=True)
class LineBreak:
    pass


@dataclass(frozen=True)
class ParEnd:
    pass


@dataclass(frozen=True)
class Fill:
    pass


@dataclass(frozen=True)
class Llap:
    inner: tuple


@dataclass(frozen=True)
class HSpace:
    width: Union[Dimension, "Var"]
    starred: bool = False
    command: str = "hspace"  # or quad / qquad


@dataclass(frozen=True)
class MakeBox:
    width: Dimension
    align: str  # "l", "r" or "c"
    inner: tuple


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class FontCmd:
    attr: str
    inner: tuple


@dataclass(frozen=True)
class BothIf:
    first: bool  # True: \bothIfFirst, False: \bothIfSecond
    a: tuple
    b: tuple


Token = Union[Literal, Param, LineBreak, ParEnd, Fill, Llap, HSpace, MakeBox, Var, FontCmd, BothIf]
Template = tuple  # tuple[Token, ...]

FONT_COMMANDS = {
    "textbf": "bf",
    "textmd": "md",
    "textit": "it",
    "textsl": "sl",
    "textsc": "sc",
    "textup": "up",
    "textrm": "rm",
    "textsf": "sf",
    "texttt": "tt",
    "emph": "it",
}

_ESCAPES = {"&": "&", "%": "%", "#": "#", "_": "_", "{": "{", "}": "}", " ": " ", "$": "$"}

# Control words that name document values (\tablename, \thefigure, ...).
_DOC_VAR_RE = re.compile(r"^(?:[A-Za-z]+name|the[A-Za-z]+)$")


# ---------------------------------------------------------------- parsing


class _Parser:
    def __init__(self, source: str, arity: int, variables: frozenset[str]) -> None:
        self.src = source
        self.pos = 0
        self.arity = arity
        self.variables = variables

    def error(self, detail: str) -> TemplateSyntaxError:
        return TemplateSyntaxError(detail)

    def parse(self, stop: str | None = None) -> tuple:
        tokens: list = []
        buf: list[str] = []

        def flush() -> None:
            if buf:
                tokens.append(Literal(_ligatures("".join(buf))))
                buf.clear()

        while self.pos < len(self.src):
            c = self.src[self.pos]
            if c == stop:
                flush()
                return tuple(tokens)
            if c == "}":
                raise self.error(f"unexpected `}}' at position {self.pos}")
            if c == "#":
                flush()
                tokens.append(self._param())
            elif c == "{":
                flush()
                self.pos += 1
                tokens.extend(self.parse("}"))
                self._expect("}")
            elif c == "~":
                buf.append(NBSP)
                self.pos += 1
            elif c == "\\":
                nxt = self.src[self.pos + 1 : self.pos + 2]
                if nxt == "\\":
                    flush()
                    self.pos += 2
                    tokens.append(LineBreak())
                elif nxt in _ESCAPES:
                    buf.append(_ESCAPES[nxt])
                    self.pos += 2
                elif nxt.isalpha():
                    flush()
                    tokens.extend(self._command())
                else:
                    raise self.error(f"unsupported control symbol `\\{nxt}'")
            elif c in " \t\n":
                buf.append(" ")
                while self.pos < len(self.src) and self.src[self.pos] in " \t\n":
                    self.pos += 1
                continue
            else:
                buf.append(c)
                self.pos += 1
        if stop is not None:
            raise self.error("missing `}'")
        flush()
        return tuple(tokens)

    def _expect(self, ch: str) -> None:
        if self.src[self.pos : self.pos + 1] != ch:
            raise self.error(f"expected `{ch}' at position {self.pos}")
        self.pos += 1

    def _param(self) -> Param:
        digit = self.src[self.pos + 1 : self.pos + 2]
        if not digit.isdigit() or digit == "0":
            raise self.error("`#' must be followed by a parameter number")
        index = int(digit)
        if index > self.arity:
            raise self.error(f"parameter #{index} exceeds arity {self.arity}")
        self.pos += 2
        return Param(index)

    def _word(self) -> str:
        m = re.compile(r"\\([A-Za-z]+)(\*?)").match(self.src, self.pos)
        assert m is not None
        self.pos = m.end()
        return m.group(1) + m.group(2)

    def _skip_space(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos] in " \t\n":
            self.pos += 1

    def _group(self) -> tuple:
        self._skip_space()
        self._expect("{")
        inner = self.parse("}")
        self._expect("}")
        return inner

    def _raw_group(self) -> str:
        self._skip_space()
        self._expect("{")
        start = self.pos
        depth = 1
        while self.pos < len(self.src):
            c = self.src[self.pos]
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    text = self.src[start : self.pos]
                    self.pos += 1
                    return text
            self.pos += 1
        raise self.error("missing `}'")

    def _optional(self) -> str | None:
        self._skip_space()
        if self.src[self.pos : self.pos + 1] != "[":
            return None
        end = self.src.find("]", self.pos)
        if end < 0:
            raise self.error("missing `]'")
        text = self.src[self.pos + 1 : end]
        self.pos = end + 1
        return text

    def _dimension(self, text: str) -> Dimension | Var:
        text = text.strip()
        if re.fullmatch(r"\\[A-Za-z]+", text):
            return Var(text[1:])
        try:
            return parse_dimension(text)
        except BadDimension:
            raise self.error(f"bad dimension `{text}'") from None

    def _command(self) -> list:
        word = self._word()
        name = word.rstrip("*")
        starred = word.endswith("*")
        if name == "par":
            self._skip_space()
            return [ParEnd()]
        if name in ("hfill", "hfil"):
            self._skip_space()
            return [Fill()]
        if name == "newline":
            self._skip_space()
            return [LineBreak()]
        if name in ("quad", "qquad"):
            self._skip_space()
            return [HSpace(Dimension(12.0 if name == "quad" else 24.0), False, name)]
        if name == "llap":
            return [Llap(self._group())]
        if name == "hspace":
            self._skip_space()
            if self.src[self.pos : self.pos + 1] == "\\":
                var = self._word()
                self._skip_space()
                return [HSpace(Var(var), starred)]
            return [HSpace(self._dimension(self._raw_group()), starred)]
        if name == "makebox":
            width = self._optional()
            align = self._optional() or "c"
            if width is None:
                raise self.error("\\makebox needs a width")
            if align not in ("l", "r", "c"):
                raise self.error(f"bad \\makebox alignment `{align}'")
            dim = self._dimension(width)
            if isinstance(dim, Var):
                raise self.error("\\makebox width must be a dimension")
            return [MakeBox(dim, align, self._group())]
        if name in ("bothIfFirst", "bothIfSecond"):
            a = self._group()
            b = self._group()
            return [BothIf(name == "bothIfFirst", a, b)]
        if name in FONT_COMMANDS:
            return [FontCmd(FONT_COMMANDS[name], self._group())]
        if name in ("space",):
            self._skip_space()
            return [Literal(" ")]
        if name in ("textendash",):
            self._skip_space()
            return [Literal("\u2013")]
        if name in self.variables or _DOC_VAR_RE.match(name):
            self._skip_space()
            return [Var(name)]
        raise self.error(f"unsupported command `\\{name}'")


def _ligatures(text: str) -> str:
    return text.replace("---", "\u2014").replace("--", "\u2013")


def parse_template(source: str, arity: int, variables: Sequence[str] = ()) -> Template:
    """Parse a declaration body; ``arity`` bounds the usable ``#n`` parameters."""
    return _Parser(source, arity, frozenset(variables)).parse()


def template_source(tokens: Sequence) -> str:
    """Render tokens back to declaration source."""
    out = []
    for tok in tokens:
        if isinstance(tok, Literal):
            text = tok.text
            for ch, esc in (("#", "\\#"), ("&", "\\&"), ("%", "\\%"), ("_", "\\_"),
                            ("{", "\\{"), ("}", "\\}"), ("$", "\\$")):
                text = text.replace(ch, esc)
            out.append(text.replace(NBSP, "~").replace("\u2014", "---").replace("\u2013", "--"))
        elif isinstance(tok, Param):
            out.append(f"#{tok.index}")
        elif isinstance(tok, LineBreak):
            out.append("\\\\")
        elif isinstance(tok, ParEnd):
            out.append("\\par ")
        elif isinstance(tok, Fill):
            out.append("\\hfill ")
        elif isinstance(tok, Llap):
            out.append(f"\\llap{{{template_source(tok.inner)}}}")
        elif isinstance(tok, HSpace):
            if tok.command != "hspace":
                out.append(f"\\{tok.command} ")
            else:
                star = "*" if tok.starred else ""
                width = f"\\{tok.width.name}" if isinstance(tok.width, Var) else _dim_source(tok.width)
                out.append(f"\\hspace{star}{{{width}}}")
        elif isinstance(tok, MakeBox):
            out.append(f"\\makebox[{_dim_source(tok.width)}][{tok.align}]{{{template_source(tok.inner)}}}")
        elif isinstance(tok, Var):
            out.append(f"\\{tok.name} ")
        elif isinstance(tok, FontCmd):
            cmd = next(k for k, v in FONT_COMMANDS.items() if v == tok.attr)
            out.append(f"\\{cmd}{{{template_source(tok.inner)}}}")
        elif isinstance(tok, BothIf):
            cmd = "bothIfFirst" if tok.first else "bothIfSecond"
            out.append(f"\\{cmd}{{{template_source(tok.a)}}}{{{template_source(tok.b)}}}")
    return "".join(out)


def _dim_source(dim: Dimension) -> str:
    if dim.relative is not None:
        return f"{dim.relative:g}\\linewidth"
    return f"{dim.points:g}pt"


def max_param(tokens: Sequence) -> int:
    best = 0
    for tok in tokens:
        if isinstance(tok, Param):
            best = max(best, tok.index)
        for sub in _children(tok):
            best = max(best, max_param(sub))
    return best


def _children(tok) -> list[tuple]:
    if isinstance(tok, (Llap, MakeBox, FontCmd)):
        return [tok.inner]
    if isinstance(tok, BothIf):
        return [tok.a, tok.b]
    return []


def literal_length(tokens: Sequence) -> int:
    total = 0
    for tok in tokens:
        if isinstance(tok, Literal):
            total += len(tok.text)
        for sub in _children(tok):
            total += literal_length(sub)
    return total


# ---------------------------------------------------------------- styled strings


@dataclass(frozen=True)
class Span:
    text: str
    attrs: tuple[str, ...] = ()


@dataclass(frozen=True)
class FillMark:
    pass


@dataclass(frozen=True)
class BreakMark:
    pass


@dataclass(frozen=True)
class ParMark:
    pass


@dataclass(frozen=True)
class SpaceMark:
    width: Dimension
    starred: bool = False


@dataclass(frozen=True)
class LlapMark:
    content: tuple


@dataclass(frozen=True)
class BoxMark:
    width: Dimension
    align: str
    content: tuple


Piece = Union[Span, FillMark, BreakMark, ParMark, SpaceMark, LlapMark, BoxMark]
Styled = tuple  # tuple[Piece, ...]


def styled(text: str, attrs: Sequence[str] = ()) -> Styled:
    return (Span(text, tuple(attrs)),) if text else ()


def plain_text(s: Styled) -> str:
    """Text content of a styled string; markers contribute nothing."""
    out = []
    for p in s:
        if isinstance(p, Span):
            out.append(p.text)
        elif isinstance(p, (LlapMark, BoxMark)):
            out.append(plain_text(p.content))
    return "".join(out)


def is_empty(s: Styled) -> bool:
    return len(s) == 0


def add_attrs(s: Styled, attrs: Sequence[str]) -> Styled:
    """Apply outer font attributes underneath the pieces' own attributes."""
    if not attrs:
        return s
    out: list = []
    for p in s:
        if isinstance(p, Span):
            merged = tuple(attrs) + tuple(a for a in p.attrs if a not in attrs)
            out.append(Span(p.text, merged))
        elif isinstance(p, LlapMark):
            out.append(LlapMark(add_attrs(p.content, attrs)))
        elif isinstance(p, BoxMark):
            out.append(BoxMark(p.width, p.align, add_attrs(p.content, attrs)))
        else:
            out.append(p)
    return tuple(out)


def has_marker(s: Styled, kind: type) -> bool:
    for p in s:
        if isinstance(p, kind):
            return True
        if isinstance(p, (LlapMark, BoxMark)) and has_marker(p.content, kind):
            return True
    return False


# ---------------------------------------------------------------- evaluation

VarValue = Union[str, Dimension]


@dataclass
class VarEnv:
    values: dict[str, VarValue] = field(default_factory=dict)

    def get(self, name: str) -> VarValue:
        try:
            return self.values[name]
        except KeyError:
            raise UnboundVariable(name) from None


def eval_template(
    tokens: Sequence,
    args: Sequence[Styled | str] = (),
    env: VarEnv | Mapping[str, VarValue] | None = None,
) -> Styled:
    if env is None:
        env = VarEnv()
    elif not isinstance(env, VarEnv):
        env = VarEnv(dict(env))
    norm = [styled(a) if isinstance(a, str) else tuple(a) for a in args]
    return _merge_spans(_eval(tokens, norm, env, ()))


def _eval(tokens: Sequence, args: list[Styled], env: VarEnv, attrs: tuple) -> list:
    out: list = []
    for tok in tokens:
        if isinstance(tok, Literal):
            out.append(Span(tok.text, attrs))
        elif isinstance(tok, Param):
            if tok.index > len(args):
                raise TemplateSyntaxError(f"missing argument #{tok.index}")
            out.extend(add_attrs(args[tok.index - 1], attrs))
        elif isinstance(tok, LineBreak):
            out.append(BreakMark())
        elif isinstance(tok, ParEnd):
            out.append(ParMark())
        elif isinstance(tok, Fill):
            out.append(FillMark())
        elif isinstance(tok, Llap):
            out.append(LlapMark(_merge_spans(_eval(tok.inner, args, env, attrs))))
        elif isinstance(tok, MakeBox):
            out.append(BoxMark(tok.width, tok.align, _merge_spans(_eval(tok.inner, args, env, attrs))))
        elif isinstance(tok, HSpace):
            width = tok.width
            if isinstance(width, Var):
                value = env.get(width.name)
                if not isinstance(value, Dimension):
                    try:
                        value = parse_dimension(value)
                    except BadDimension:
                        raise TemplateSyntaxError(f"`\\{width.name}' is not a length") from None
                width = value
            out.append(SpaceMark(width, tok.starred))
        elif isinstance(tok, Var):
            value = env.get(tok.name)
            out.append(Span(str(value), attrs))
        elif isinstance(tok, FontCmd):
            inner_attrs = attrs + ((tok.attr,) if tok.attr not in attrs else ())
            out.extend(_eval(tok.inner, args, env, inner_attrs))
        elif isinstance(tok, BothIf):
            a = _merge_spans(_eval(tok.a, args, env, attrs))
            b = _merge_spans(_eval(tok.b, args, env, attrs))
            test = a if tok.first else b
            if not _blank(test):
                out.extend(a)
                out.extend(b)
    return out


def _blank(s: Styled) -> bool:
    return all(isinstance(p, Span) and p.text == "" for p in s)


def _merge_spans(pieces: Sequence) -> Styled:
    out: list = []
    for p in pieces:
        if isinstance(p, Span):
            if not p.text:
                continue
            if out and isinstance(out[-1], Span) and out[-1].attrs == p.attrs:
                out[-1] = Span(out[-1].text + p.text, p.attrs)
                continue
        out.append(p)
    return tuple(out)


def both_if_first(a: str, b: str) -> str:
    return a + b if a else ""


def both_if_second(a: str, b: str) -> str:
    return a + b if b else ""
