import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from captionkit.diagnostics import NotLegacy
from captionkit.optparse import Dimension, parse_option_list
from captionkit.registry import BASE_STYLE, FontSpec
from captionkit.settings import LEGACY_TABLE, Context, SettingsStore, map_legacy
from oracles import clamp_margin


def resolved(*scopes, float_type="figure", ctx=None):
    store = SettingsStore()
    local = None
    for scope, opts in scopes:
        if scope == "local":
            local = parse_option_list(opts)
        else:
            assert store.setup(scope, opts) == []
    return store.resolve(float_type, local, ctx)


def comparable(s):
    """Settings as a plain dict, with the single-line variant flattened."""
    out = dataclasses.asdict(s)
    out.pop("singleline")
    out["singleline_variant"] = None if s.singleline is None else comparable(s.singleline)
    return out


# ---------------------------------------------------------------- defaults and examples


def test_defaults_match_the_base_expansion():
    s = resolved()
    assert (s.format, s.labelformat, s.labelsep, s.justification) == ("plain", "simple", "colon", "justified")
    assert s.font == s.labelfont == s.textfont == FontSpec()
    assert s.margin_left == s.margin_right == Dimension(0.0)
    assert s.indention == s.parindent == s.hangindent == Dimension(0.0)
    assert s.singlelinecheck is True
    assert s.skip == Dimension(10.0)
    assert s.singleline.justification == "centering"
    assert s.singleline.indention == Dimension(0.0)


def test_additive_font_matches_combined_font():
    a = resolved(("global", "font=small"), ("global", "font+=it"))
    b = resolved(("global", "font={small,it}"))
    assert a.font == b.font == FontSpec(size="small", shape="it")


def test_type_scope_only_applies_to_its_type():
    store = SettingsStore()
    store.setup("type:table", "position=above")
    assert store.resolve("table").position == "top"
    assert store.resolve("figure").position == "auto"


def test_undefined_style_is_reported_and_dropped():
    store = SettingsStore()
    [d] = store.setup("global", "style=bogus,font=small")
    assert d.message == "Undefined style `bogus'."
    assert store.global_scope.options == parse_option_list("font=small")


def test_unknown_key_is_an_error():
    [d] = SettingsStore().setup("global", "colour=red")
    assert d.code == "unknown-option"


def test_position_aliases_become_type_scope_entries():
    store = SettingsStore()
    store.setup("global", "tableposition=top")
    assert store.type_scopes["table"].options == parse_option_list("position=top")
    assert store.resolve("table").position == "top"
    assert store.resolve("figure").position == "auto"


@pytest.mark.parametrize("word, position", [("above", "top"), ("t", "top"), ("below", "bottom"), ("b", "bottom"), ("auto", "auto")])
def test_position_synonyms(word, position):
    assert resolved(("global", f"position={word}")).position == position


def test_margin_pair_swaps_on_even_twoside_pages():
    s = resolved(("global", "margin={0pt,10pt},twoside"), ctx=Context(page=2))
    assert (s.margin_left.points, s.margin_right.points) == (10.0, 0.0)
    s = resolved(("global", "margin={0pt,10pt},twoside,oneside"), ctx=Context(page=2))
    assert (s.margin_left.points, s.margin_right.points) == (0.0, 10.0)


def test_document_sidedness_mirrors_unless_oneside_given():
    ctx = Context(page=4, sidedness="twoside")
    assert resolved(("global", "margin={1pt,2pt}"), ctx=ctx).margin_left.points == 2.0
    assert resolved(("global", "margin={1pt,2pt},oneside"), ctx=ctx).margin_left.points == 1.0


@pytest.mark.parametrize("margin, low, high", [(30, None, 20), (5, 8, None), (12, 8, 20), (50, 10, 40)])
def test_min_and_max_margin_clamp_both_sides(margin, low, high):
    opts = f"margin={margin}pt"
    if low is not None:
        opts += f",minmargin={low}pt"
    if high is not None:
        opts += f",maxmargin={high}pt"
    s = resolved(("global", opts))
    want = clamp_margin(margin, low, high)
    assert s.margin_left.points == s.margin_right.points == want


def test_width_and_margin_interplay():
    s = resolved(("global", "width=.75\\textwidth"))
    assert s.width == Dimension(0.0, 0.75)
    s = resolved(("global", "width=100pt,margin=3pt"))
    assert s.width is None and s.margin_left.points == 3.0
    s = resolved(("global", "width=100pt,margin*=3pt"))
    assert s.width == Dimension(100.0) and s.margin_left.points == 0.0
    assert resolved(("global", "margin*=3pt")).margin_left.points == 3.0


def test_names_lists_and_within():
    s = resolved(("global", "figurename=Рис.,listtablename=Таблицы,figurewithin=section"))
    assert s.names["figure"] == "Рис."
    assert s.list_names["table"] == "Таблицы"
    assert s.within["figure"] == "section"
    assert s.display_name("figure") == "Рис."
    assert resolved(("local", "name=Fig.")).display_name("figure") == "Fig."


def test_singleline_variant_overrides_local_options():
    s = resolved(("local", "justification=raggedleft,indention=1cm"))
    assert s.justification == "raggedleft"
    assert s.singleline.justification == "centering"
    assert s.singleline.indention == Dimension(0.0)


def test_user_style_without_singleline_list_has_no_variant():
    store = SettingsStore()
    store.registries.declare_style("mystyle", "font=footnotesize,labelfont=sc,margin={10mm,0mm}")
    store.setup("global", "style=mystyle")
    s = store.resolve("figure")
    assert s.font.size == "footnotesize" and s.singleline is None


def test_declared_option_binds_variable():
    store = SettingsStore()
    store.registries.declare_option("myindention", "\\setlength\\myindention{#1}")
    store.setup("type:figure", "myindention=1cm")
    assert store.resolve("figure").vars["myindention"] == Dimension(28.45)


# ---------------------------------------------------------------- clear, show, unused


def test_clear_setup_removes_key():
    store = SettingsStore()
    store.setup("type:table", "position=above,font=small")
    assert store.clear_setup("table", ["position"]) == []
    assert store.type_scopes["table"].options == parse_option_list("font=small")


def test_clear_setup_warnings():
    store = SettingsStore()
    store.setup("type:table", "font=small")
    [d] = store.clear_setup("table", ["position"])
    assert d.message == "Option `position' was not in list `table'."
    [d] = store.clear_setup("figure", ["position"])
    assert d.message == "Option list `figure' undefined."
    assert store.clear_setup("figure", ["position"], starred=True) == []
    assert store.clear_setup("table", ["position"], starred=True) == []


def test_show_setup_lists_in_order():
    store = SettingsStore()
    store.setup("global", "font=small")
    store.setup("global", "labelfont=bf")
    assert store.show_setup("global") == "Caption options for `global': font={small},labelfont={bf}"


def test_unused_setups():
    store = SettingsStore()
    store.setup("type:wrapfigure", "name=Fig.")
    store.setup("type:figure", "font=small")
    store.setup("type:sidecap", "font=small", starred=True)
    store.resolve("figure")
    assert [d.message for d in store.unused_setups()] == ["Unused \\captionsetup[wrapfigure]."]


# ---------------------------------------------------------------- legacy


@pytest.mark.parametrize(
    "name, modern",
    [
        ("nooneline", "singlelinecheck=off"),
        ("flushright", "justification=raggedleft"),
        ("scriptsize", "font=scriptsize"),
        ("hang", "format=hang"),
    ],
)
def test_legacy_examples(name, modern):
    assert map_legacy(name) == parse_option_list(modern)


def test_legacy_table_has_all_rows():
    assert len(LEGACY_TABLE) == 24


def test_not_legacy():
    with pytest.raises(NotLegacy):
        map_legacy("margin")


def test_style_base_equals_its_expansion():
    assert comparable(resolved(("global", "style=base"))) == comparable(resolved(("global", BASE_STYLE)))


# ---------------------------------------------------------------- properties

_legacy_names = st.sampled_from(sorted(LEGACY_TABLE))


@settings(max_examples=1000, deadline=None)
@given(st.lists(_legacy_names, min_size=1, max_size=4), st.sampled_from(["package", "global", "type:figure"]))
def test_legacy_closure(names, scope):
    legacy = resolved((scope, ",".join(names)))
    modern = resolved((scope, ",".join(map_legacy(n).serialize() for n in names)))
    assert comparable(legacy) == comparable(modern)


_dims = st.integers(min_value=-400, max_value=400).map(lambda n: f"{n / 4:g}pt")

# key -> strategy of values, with the settings field used to observe it
_WINNABLE = {
    "format": (st.sampled_from(["plain", "hang"]), "format"),
    "labelformat": (st.sampled_from(["empty", "simple", "brace", "parens"]), "labelformat"),
    "labelsep": (st.sampled_from(["none", "colon", "period", "space", "quad", "endash"]), "labelsep"),
    "justification": (st.sampled_from(["justified", "centering", "centerlast", "raggedleft"]), "justification"),
    "indention": (_dims, "indention"),
    "parskip": (_dims, "parskip"),
    "position": (st.sampled_from(["top", "bottom", "auto"]), "position"),
    "singlelinecheck": (st.sampled_from(["true", "false"]), "singlelinecheck"),
    "font": (st.sampled_from(["small", "large", "it", "bf"]), "font"),
    "listformat": (st.sampled_from(["simple", "parens", "subparens"]), "listformat"),
}
_ORDER = ["package", "global", "type:figure", "local"]


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_later_scope_wins(data):
    key = data.draw(st.sampled_from(sorted(_WINNABLE)))
    values, attr = _WINNABLE[key]
    first, second = sorted(data.draw(st.lists(st.sampled_from(_ORDER), min_size=2, max_size=2, unique=True)), key=_ORDER.index)
    v1, v2 = data.draw(values), data.draw(values)
    both = resolved((first, f"{key}={v1}"), (second, f"{key}={v2}"))
    only_second = resolved((second, f"{key}={v2}"))
    assert getattr(both, attr) == getattr(only_second, attr)
    # within one scope, the later entry wins too
    same = resolved((first, f"{key}={v1},{key}={v2}"))
    assert getattr(same, attr) == getattr(resolved((first, f"{key}={v2}")), attr)


@settings(max_examples=1000, deadline=None)
@given(_dims, st.sampled_from(["package", "global", "type:figure", "local"]))
def test_scalar_margin_equals_pair(x, scope):
    assert comparable(resolved((scope, f"margin={x}"))) == comparable(resolved((scope, f"margin={{{x},{x}}}")))


@settings(max_examples=1000, deadline=None)
@given(_dims, _dims, st.integers(min_value=1, max_value=500), st.booleans())
def test_twoside_mirror_involution(left, right, page, by_class):
    opts = f"margin={{{left},{right}}}" + ("" if by_class else ",twoside")
    side = "twoside" if by_class else "oneside"
    a = resolved(("global", opts), ctx=Context(page=page, sidedness=side))
    b = resolved(("global", opts), ctx=Context(page=page + 1, sidedness=side))
    assert (a.margin_left, a.margin_right) == (b.margin_right, b.margin_left)
    a2 = dataclasses.replace(a, margin_left=b.margin_left, margin_right=b.margin_right, singleline=None)
    b2 = dataclasses.replace(b, singleline=None)
    assert a2 == b2


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(sorted(_WINNABLE)), st.data()), max_size=0), st.data())
def test_resolve_is_deterministic_and_idempotent(_, data):
    store = SettingsStore()
    for scope in ("package", "global", "type:figure"):
        key = data.draw(st.sampled_from(sorted(_WINNABLE)))
        store.setup(scope, f"{key}={data.draw(_WINNABLE[key][0])}")
    ctx = Context(page=data.draw(st.integers(1, 9)))
    assert comparable(store.resolve("figure", None, ctx)) == comparable(store.resolve("figure", None, ctx))
