import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from captionkit.layout import (
    CellMetrics,
    LabelsepIncompatible,
    WordTooWide,
    break_paragraph,
    typeset,
)
from captionkit.optparse import parse_option_list
from captionkit.scenario import render_box
from captionkit.settings import SettingsStore
from captionkit.template import NBSP
from oracles import pt_to_cells, reference_breaks

SAMPLE = (
    "Белая шляпа с низкой тульей и широкими полями, "
    "украшенная пышным страусовым пером, лежит на столе рядом с перчатками."
)
MODES = ["justified", "centering", "centerlast", "centerfirst", "raggedright", "raggedleft"]


def caption_box(opts="", heading=SAMPLE, setup="", number="1", float_type="figure", width=72, position=None):
    store = SettingsStore()
    if setup:
        assert store.setup("global", setup) == []
    s = store.resolve(float_type, parse_option_list(opts))
    return typeset(
        s, store.registries, s.display_name(float_type), number, heading, CellMetrics(width), position=position
    )


def texts(box):
    return [(ln.column, ln.text.replace(NBSP, " ")) for ln in box.text_lines()]


# ---------------------------------------------------------------- worked shapes


def test_short_caption_is_centered_by_single_line_check():
    box = caption_box(heading="Белая шляпа.")
    [(col, text)] = texts(box)
    assert text == "Figure 1: Белая шляпа."
    assert col == (72 - len(text)) // 2


def test_single_line_check_off_keeps_justification():
    [(col, _)] = texts(caption_box("singlelinecheck=off,justification=raggedleft", heading="Short."))
    assert col == 72 - len("Figure 1: Short.")
    [(col, _)] = texts(caption_box("singlelinecheck=off", heading="Short."))
    assert col == 0


def test_hang_continuations_align_under_text():
    box = caption_box("format=hang")
    lines = texts(box)
    assert len(lines) > 1
    assert lines[0][1].startswith("Figure 1: ")
    assert all(col == 10 for col, _ in lines[1:])


def test_indention_half_centimetre_is_two_cells():
    lines = texts(caption_box("indention=.5cm"))
    assert lines[0][0] == 0
    assert all(col == 2 for col, _ in lines[1:])


def test_negative_indention_is_clamped_at_margin():
    lines = texts(caption_box("indention=-0.5cm"))
    assert all(col == 0 for col, _ in lines)
    lines = texts(caption_box("indention=-0.5cm,margin=10mm"))
    assert lines[0][0] == 5
    assert all(col == 3 for col, _ in lines[1:])


def test_newline_separator_breaks_after_label():
    lines = texts(caption_box("labelsep=newline,singlelinecheck=off"))
    assert lines[0][1] == "Figure 1"
    assert lines[1][1].startswith("Белая")


def test_newline_separator_rejected_with_hang():
    with pytest.raises(LabelsepIncompatible) as info:
        caption_box("format=hang,labelsep=newline")
    assert "labelsep=newline" in info.value.diagnostic.message


def test_centerlast_centers_final_line_only():
    box = caption_box("justification=centerlast")
    lines = box.text_lines()
    assert all(ln.column == 0 and ln.end == 72 for ln in lines[:-1])
    last = lines[-1]
    assert last.column == (72 - len(last.text)) // 2


def test_position_top_puts_skip_below():
    box = caption_box(position="top")
    assert (box.skip_above, box.skip_below) == (0, 2)
    box = caption_box(position="bottom")
    assert (box.skip_above, box.skip_below) == (2, 0)


def test_margin_pair_and_relative_width():
    box = caption_box("margin={10mm,0mm}")
    assert box.left == pt_to_cells(28.45) and box.usable == 72 - box.left
    box = caption_box("width=.75\\linewidth")
    assert (box.left, box.usable) == (9, 54)


def test_parskip_and_hangindent_with_two_paragraphs():
    heading = SAMPLE + "\\par " + SAMPLE
    box = caption_box("parskip=6pt,hangindent=12pt,parindent=18pt", heading=heading)
    lines = list(box.lines)
    blank = next(i for i, ln in enumerate(lines) if not ln.cells)
    first, second = lines[:blank], lines[blank + 1 :]
    assert first[0].column == 0 and all(ln.column == 2 for ln in first[1:])
    assert second[0].column == 3 and all(ln.column == 2 for ln in second[1:])


def test_render_box_indents_with_margin():
    box = caption_box("margin=22pt", heading="Короткая подпись.", width=60)
    out = render_box(box, 60)
    rows = out.splitlines()
    assert rows[:2] == ["", ""]
    indent = len(rows[2]) - len(rows[2].lstrip(" "))
    assert box.left == 4 and indent == box.left + (box.usable - len(rows[2].strip())) // 2


def test_word_wider_than_line():
    with pytest.raises(WordTooWide):
        break_paragraph("abcdefghij", "justified", 5)


def test_starred_label_separator_keeps_label_font():
    box = caption_box("labelfont=bf,labelsep=endash", heading="Текст.")
    spans = box.text_lines()[0].spans()
    assert spans[0] == ("Figure 1", ("bf",))
    assert spans[1] == (" – Текст.", ())


# ---------------------------------------------------------------- properties

_words = st.lists(st.text(alphabet="абвгдxyz", min_size=1, max_size=9), min_size=1, max_size=25)
_widths = st.integers(min_value=10, max_value=120)


def _words_of(lines):
    return [w for ln in lines for w in ln.text.split()]


@settings(max_examples=1000, deadline=None)
@given(_words, _widths, st.sampled_from(MODES))
def test_lines_fit(words, width, mode):
    for ln in break_paragraph(" ".join(words), mode, width):
        assert 0 <= ln.column and ln.end <= width


@settings(max_examples=1000, deadline=None)
@given(_words, _widths, st.sampled_from(MODES))
def test_text_is_conserved(words, width, mode):
    assert _words_of(break_paragraph(" ".join(words), mode, width)) == words


@settings(max_examples=1000, deadline=None)
@given(_words, st.integers(min_value=16, max_value=120), st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=6))
def test_greedy_maximality(words, width, first_indent, hang):
    lines = break_paragraph(" ".join(words), "raggedright", width, first_indent, hang)
    for k in range(len(lines) - 1):
        indent = first_indent if k == 0 else hang
        natural = len(" ".join(lines[k].text.split()))
        following = lines[k + 1].text.split()[0]
        assert indent + natural + 1 + len(following) > width


@settings(max_examples=1000, deadline=None)
@given(_words, _widths)
def test_justified_gaps_are_even(words, width):
    lines = break_paragraph(" ".join(words), "justified", width)
    for ln in lines[:-1]:
        gaps = _gap_lengths(ln.text)
        if gaps:
            assert ln.end == width
            assert max(gaps) - min(gaps) <= 1
            assert gaps == sorted(gaps, reverse=True)
    assert lines[-1].column == 0 and "  " not in lines[-1].text


def _gap_lengths(text):
    gaps, run = [], 0
    for ch in text.strip(" "):
        if ch == " ":
            run += 1
        elif run:
            gaps.append(run)
            run = 0
    return gaps


@settings(max_examples=1000, deadline=None)
@given(_words, _widths)
def test_modes_agree_on_line_contents(words, width):
    text = " ".join(words)
    reference = [ln.text.split() for ln in break_paragraph(text, "raggedright", width)]
    for mode in MODES:
        assert [ln.text.split() for ln in break_paragraph(text, mode, width)] == reference


@settings(max_examples=1000, deadline=None)
@given(_words, st.integers(min_value=6, max_value=40))
def test_breaks_match_reference(words, width):
    words = [w[:6] for w in words]
    got = [ln.text.split() for ln in break_paragraph(" ".join(words), "raggedright", width)]
    want = [[words[i] for i in line] for line in reference_breaks([len(w) for w in words], width)]
    assert got == want


@settings(max_examples=1000, deadline=None)
@given(
    st.sampled_from(["top", "bottom", "auto"]),
    st.integers(min_value=0, max_value=40).map(lambda n: f"{n}pt"),
    st.sampled_from(["", "format=hang", "labelsep=newline", "justification=centerlast"]),
    st.text(alphabet="абв ", min_size=1, max_size=60).filter(str.strip),
)
def test_skip_goes_on_one_side_only(position, skip, extra, heading):
    opts = f"position={position},skip={skip}" + ("," + extra if extra else "")
    box = caption_box(opts, heading=heading)
    assert box.skip_above == 0 or box.skip_below == 0
    assert box.skip_above + box.skip_below == pt_to_cells(float(skip[:-2]))
    if position == "top":
        assert box.skip_above == 0
