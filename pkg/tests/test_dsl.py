"""Parsing, canonical printing, and elaboration of bundle documents."""

import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from daffine import dsl
from daffine.affine import BispecialRep
from daffine.atlas import Atlas, first_difference
from daffine.dsl import (
    Document,
    DoubleBlock,
    PolyValue,
    SpecialBundleBlock,
    block_from_atlas,
    block_from_double,
    block_from_graded,
    block_from_space,
    block_from_special_bundle,
    elaborate,
    parse,
    print_document,
)
from daffine.errors import (
    DaffineError,
    DuplicateName,
    ParseError,
    UnresolvedReference,
)
from daffine.exact import Poly, Vec
from daffine.naffine import NAffine
from daffine.phase import OneForm, TrivialBispecial
from daffine.randgen import rand_double_affine, rand_naffine, three_chart_atlas

FIXTURES = Path(__file__).parent / "fixtures"

MINIMAL = "double A { n1=1; n2=1; n3=1; l1=[1]; l2=[1]; sigma=[1]; }"


# ---------------------------------------------------------------------------
# parsing and diagnostics
# ---------------------------------------------------------------------------


def test_minimal_document_parses_and_elaborates():
    objs = elaborate(parse(MINIMAL))
    block = objs["A"]
    assert isinstance(block, DoubleBlock)
    assert block.space.dims == (1, 1, 1)
    assert block.bundle is not None and block.bundle.is_special
    assert block.bundle.l1 == Vec.of(1)
    assert block.bundle.sigma == Vec.of(1)


def test_comments_and_whitespace_are_ignored():
    text = "# leading\ndouble A {\n  n1=1; # trailing\n  n2=1; n3=1;\n}\n"
    doc = parse(text)
    assert doc.blocks[0].field_map()["n1"] == F(1)


def test_parse_error_carries_position_and_expectations():
    with pytest.raises(ParseError) as err:
        parse("double A { n1 = ; }")
    e = err.value
    assert (e.line, e.col) == (1, 17)
    assert "a rational" in e.expected
    assert e.found == ";"
    assert "line 1, col 17" in str(e)


def test_unknown_block_kind_is_rejected():
    with pytest.raises(ParseError) as err:
        parse("module A { }")
    assert "double" in err.value.expected
    assert err.value.found == "module"


def test_missing_semicolon_points_at_the_next_token():
    with pytest.raises(ParseError) as err:
        parse("double A { n1 = 1 n2 = 1; }")
    assert err.value.expected == ("';'",)
    assert err.value.found == "n2"


def test_unterminated_block_reports_end_of_input():
    with pytest.raises(ParseError) as err:
        parse("double A { n1 = 1;")
    assert err.value.found == "end of input"


def test_stray_character_is_a_tokenizer_error():
    with pytest.raises(ParseError) as err:
        parse("double A { n1 = @; }")
    assert (err.value.line, err.value.col) == (1, 17)


def test_empty_vector_for_a_functional_names_the_field():
    with pytest.raises(ParseError) as err:
        parse("double A { n1=1; n2=1; n3=1; l1=[]; l2=[1]; }")
    assert "l1" in str(err.value)
    assert err.value.found == "[]"


def test_empty_lists_are_fine_where_content_is_optional():
    doc = parse("atlas A { base_dim=1; fiber_dims=[1,1,1]; charts=[u]; }")
    assert doc.blocks[0].field_map()["charts"] == ("u",)
    atlas = elaborate(doc)["A"]
    assert atlas.edges == ()


def test_duplicate_field_is_rejected():
    with pytest.raises(ParseError) as err:
        parse("double A { n1=1; n1=2; }")
    assert "other than 'n1'" in str(err.value)


def test_duplicate_block_name_is_rejected():
    with pytest.raises(DuplicateName):
        parse("double A { n1=1; n2=1; n3=1; } space A { hull_dim=2; alpha=[0,1]; }")


def test_unknown_field_key_is_rejected():
    with pytest.raises(ParseError) as err:
        parse("double A { n4 = 1; }")
    assert "n1" in err.value.expected and err.value.found == "n4"


def test_bare_ident_value_must_end_the_field():
    with pytest.raises(ParseError) as err:
        parse("atlas A { charts = [u w]; }")
    assert err.value.expected == ("';'", "','", "']'")
    assert err.value.found == "w"


def test_rationals_are_normalized():
    doc = parse("double A { n1=1; n2=1; n3=1; l1=[2/4]; l2=[-4/2]; }")
    fm = doc.blocks[0].field_map()
    assert fm["l1"] == (F(1, 2),)
    assert fm["l2"] == (F(-2),)
    assert "1/2" in print_document(doc) and "-2" in print_document(doc)


# ---------------------------------------------------------------------------
# polynomial values
# ---------------------------------------------------------------------------


def test_polynomial_precedence_and_powers():
    doc = parse("atlas A { base_dim=2; fiber_dims=[1,1,1]; charts=[u];"
                " u.u.gamma00 = [1 + 2*x1*x2^2 - x1]; u.u.base_p=[[1,0],[0,1]];"
                " u.u.base_q=[0,0]; u.u.alpha0=[0]; u.u.alpha=[[1]];"
                " u.u.beta0=[0]; u.u.beta=[[1]]; u.u.gamma_y=[[0]];"
                " u.u.gamma_z=[[0]]; u.u.gamma_yz=[[[0]]]; u.u.sigma=[[1]]; }")
    val = doc.blocks[0].field_map()["u.u.gamma00"][0]
    assert isinstance(val, PolyValue)
    assert val.to_poly(2) == Poly(2, {(0, 0): F(1), (1, 2): F(2), (1, 0): F(-1)})


def test_constant_expressions_collapse_to_rationals():
    doc = parse("double A { n1=1; n2=1; n3=1; l1=[x1 - x1 + 3/6]; l2=[(2 + 1)*2]; }")
    fm = doc.blocks[0].field_map()
    assert fm["l1"] == (F(1, 2),)
    assert fm["l2"] == (F(6),)


def test_polynomial_printing_is_canonical():
    src = "double A { n1=1; n2=1; n3=1; l1=[x2 + x1^2 - 1 + 2*x1^2]; l2=[1]; }"
    text = print_document(parse(src))
    assert "l1 = [3*x1^2 + x2 - 1];" in text


def test_unary_minus_and_nested_parens():
    doc = parse("double A { n1=1; n2=1; n3=1; l1=[-(-(x1))]; l2=[- - 2]; }")
    fm = doc.blocks[0].field_map()
    assert fm["l1"][0].to_poly(1) == Poly.variable(1, 0)
    assert fm["l2"] == (F(2),)


def test_fractional_exponent_is_rejected():
    with pytest.raises(ParseError) as err:
        parse("double A { n1=1; l1=[x1^(1/2)]; }")
    assert err.value.expected == ("an integer exponent",)


def test_missing_denominator_is_rejected():
    with pytest.raises(ParseError) as err:
        parse("double A { n1 = 1/; }")
    assert err.value.expected == ("a denominator",)


# ---------------------------------------------------------------------------
# canonical field order and round trips
# ---------------------------------------------------------------------------


def test_fields_are_sorted_canonically():
    doc = parse("double A { sigma=[1]; n3=1; l2=[1]; n1=1; l1=[1]; n2=1; }")
    assert [k for k, _ in doc.blocks[0].fields] == ["n1", "n2", "n3", "l1", "l2", "sigma"]


def test_graded_fields_sort_dims_then_functionals():
    doc = parse(
        "graded G { sigma=[1]; l_01=[1]; dim_11=1; l_10=[1]; n=2; dim_01=1; dim_10=1; }"
    )
    assert [k for k, _ in doc.blocks[0].fields] == [
        "n", "dim_01", "dim_10", "dim_11", "l_10", "l_01", "sigma",
    ]


def test_atlas_edges_group_by_edge_in_field_order():
    text = ("atlas A { charts=[u, w]; base_dim=1; fiber_dims=[1,1,1];"
            " w.u.base_q=[0]; u.w.base_q=[0]; u.w.base_p=[[1]]; w.u.base_p=[[1]]; }")
    keys = [k for k, _ in parse(text).blocks[0].fields]
    assert keys == [
        "base_dim", "fiber_dims", "charts",
        "u.w.base_p", "u.w.base_q", "w.u.base_p", "w.u.base_q",
    ]


def test_print_then_parse_is_identity():
    src = ("double A { sigma=[2/4]; n3=1; l2=[1]; n1=2; l1=[1, x1 - x1 - 3]; n2=1; }"
           " graded G { n=1; dim_1=2; l_1=[1, 1]; }")
    doc = parse(src)
    text = print_document(doc)
    assert parse(text) == doc
    assert print_document(parse(text)) == text


@pytest.mark.parametrize(
    "path", sorted(p.name for p in FIXTURES.glob("*.daff") if p.name != "parse_error.daff")
)
def test_fixture_round_trips(path):
    doc = parse((FIXTURES / path).read_text())
    assert parse(print_document(doc)) == doc
    elaborate(doc)


def test_parse_error_fixture_names_the_field():
    with pytest.raises(ParseError) as err:
        parse((FIXTURES / "parse_error.daff").read_text())
    assert "l1" in str(err.value)


# ---------------------------------------------------------------------------
# elaboration
# ---------------------------------------------------------------------------


def test_space_block_builds_a_bispecial_presentation():
    doc = parse("space S { hull_dim=3; alpha=[0,0,1]; v=[1,0,0]; }")
    rep = elaborate(doc)["S"]
    assert isinstance(rep, BispecialRep)
    assert rep.hull_dim == 3 and rep.v == Vec.of(1, 0, 0)


def test_double_needs_both_functionals_or_neither():
    with pytest.raises(DaffineError, match="both l1 and l2"):
        elaborate(parse("double A { n1=1; n2=1; n3=1; l1=[1]; }"))


def test_sigma_without_functionals_is_rejected():
    with pytest.raises(DaffineError, match="sigma but no l1/l2"):
        elaborate(parse("double A { n1=1; n2=1; n3=1; sigma=[1]; }"))


def test_constraint_rows_are_exact_rationals():
    doc = parse("double A { n1=1; n2=1; n3=1; constraints=[[0, 1/3, 1, 0, 1, 1]]; }")
    block = elaborate(doc)["A"]
    assert block.constraints == ((F(0), F(1, 3), F(1), F(0), F(1), F(1)),)


def test_special_bundle_with_and_without_covector():
    doc = parse("special_bundle E { m=1; n=2; omega=[5]; } special_bundle F { m=0; n=1; }")
    objs = elaborate(doc)
    assert isinstance(objs["E"], SpecialBundleBlock)
    assert objs["E"].bundle == TrivialBispecial(1, 2)
    assert objs["E"].omega == OneForm(Vec.of(5))
    assert objs["F"].omega is None


def test_graded_block_builds_a_marked_bundle():
    doc = parse(
        "graded G { n=2; dim_01=1; dim_10=2; dim_11=2; l_10=[1,1]; l_01=[1]; sigma=[2,-2]; }"
    )
    a = elaborate(doc)["G"]
    assert isinstance(a, NAffine)
    assert a.space.dim_of((1, 0)) == 2
    assert a.functionals[0] == Vec.of(1, 1) and a.functionals[1] == Vec.of(1)
    assert a.sigma == Vec.of(2, -2)


def test_graded_missing_functional_is_named():
    with pytest.raises(DaffineError, match="l_010"):
        elaborate(parse(
            "graded G { n=3; dim_001=1; dim_010=1; dim_100=1; dim_111=1;"
            " l_100=[1]; l_001=[1]; }"
        ))


def test_graded_bitstring_length_must_match_order():
    with pytest.raises(DaffineError, match="length must equal n=2"):
        elaborate(parse("graded G { n=2; dim_011=1; l_10=[1]; l_01=[1]; }"))


def test_atlas_undeclared_chart_is_unresolved():
    with pytest.raises(UnresolvedReference, match="undeclared chart 'w'"):
        elaborate(parse(
            "atlas A { base_dim=1; fiber_dims=[1,1,1]; charts=[u]; w.u.base_q=[0]; }"
        ))


def test_atlas_missing_edge_field_is_reported():
    with pytest.raises(DaffineError, match="missing field 'alpha'"):
        elaborate(parse(
            "atlas A { base_dim=1; fiber_dims=[1,1,1]; charts=[u, w];"
            " u.w.base_p=[[1]]; u.w.base_q=[0]; u.w.alpha0=[0]; }"
        ))


def test_polynomial_variable_beyond_base_dim_is_rejected():
    with pytest.raises(DaffineError, match="x3"):
        elaborate(parse(
            "atlas A { base_dim=2; fiber_dims=[1,1,1]; charts=[u];"
            " u.u.base_p=[[1,0],[0,1]]; u.u.base_q=[0,0]; u.u.alpha0=[x3];"
            " u.u.alpha=[[1]]; u.u.beta0=[0]; u.u.beta=[[1]]; u.u.gamma00=[0];"
            " u.u.gamma_y=[[0]]; u.u.gamma_z=[[0]]; u.u.gamma_yz=[[[0]]]; u.u.sigma=[[1]]; }"
        ))


def test_non_integer_dimension_is_rejected():
    with pytest.raises(DaffineError, match="expected an integer"):
        elaborate(parse("double A { n1=1/2; n2=1; n3=1; }"))


# ---------------------------------------------------------------------------
# serialization of computed objects
# ---------------------------------------------------------------------------


def test_double_block_serializer_round_trips():
    rng = random.Random(3)
    a = rand_double_affine(rng, 2, 3, 2)
    doc = Document((block_from_double("A", a.space, a),))
    assert parse(print_document(doc)) == doc
    again = elaborate(doc)["A"].bundle
    assert again == a


def test_space_and_bundle_serializers_round_trip():
    doc = Document((
        block_from_space("S", BispecialRep(3, Vec.of(0, 0, 1), Vec.of(1, 0, 0))),
        block_from_special_bundle("E", TrivialBispecial(1, 2), OneForm(Vec.of(7))),
    ))
    assert parse(print_document(doc)) == doc


def test_graded_serializer_round_trips():
    rng = random.Random(4)
    a = rand_naffine(rng, 3)
    doc = Document((block_from_graded("G", a),))
    assert parse(print_document(doc)) == doc
    assert elaborate(doc)["G"] == a


def test_atlas_serializer_preserves_every_coefficient():
    rng = random.Random(5)
    atlas = three_chart_atlas(rng, m=2, dims=(1, 2, 1))
    doc = Document((block_from_atlas("T", atlas),))
    assert parse(print_document(doc)) == doc
    rebuilt = elaborate(doc)["T"]
    assert isinstance(rebuilt, Atlas)
    original = {(a, b): t for a, b, t in atlas.edges}
    assert len(rebuilt.edges) == len(atlas.edges)
    for a, b, t in rebuilt.edges:
        assert first_difference(original[(a, b)], t) is None
