import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture_text
from ltqp.lexer import ParseError
from ltqp.rdf import (
    LDP,
    RDF_LANGSTRING,
    RDF_TYPE,
    BlankNode,
    Iri,
    Literal,
    Triple,
    iris_of,
    make_triple,
    strip_fragment,
    to_ntriples,
)
from ltqp.turtle import parse_turtle, resolve_iri, serialize_turtle

V = "https://v.example/"


def test_container_document_parses_to_thirteen_triples():
    doc = parse_turtle(fixture_text("container.ttl"), V)
    assert len(doc.triples) == 13
    root = Iri(V)
    assert sum(1 for s, p, o in doc.triples if s == root and p == RDF_TYPE) == 3
    contains = {o for s, p, o in doc.triples if s == root and p == Iri(LDP + "contains")}
    assert contains == {Iri(V + "file.ttl"), Iri(V + "posts/"), Iri(V + "profile/")}
    assert sum(1 for s, *_ in doc.triples if s == Iri(V + "file.ttl")) == 1
    assert sum(1 for s, *_ in doc.triples if s == Iri(V + "posts/")) == 3
    assert sum(1 for s, *_ in doc.triples if s == Iri(V + "profile/")) == 3


def test_empty_document():
    assert parse_turtle("", V).triples == ()


def test_relative_resolution():
    doc = parse_turtle("<#me> <http://x/p> <o>.", "http://x/card")
    assert doc.triples == (Triple(Iri("http://x/card#me"), Iri("http://x/p"), Iri("http://x/o")),)


def test_empty_fragment_namespace_survives_resolution():
    assert resolve_iri("/vocab#", "http://h:1/a/b") == "http://h:1/vocab#"
    doc = parse_turtle("@prefix v: </vocab#>. <a> v:p v:o.", "http://h/x")
    assert doc.triples[0].predicate == Iri("http://h/vocab#p")


def test_profile_with_corrected_namespace():
    doc = parse_turtle(fixture_text("profile.ttl"), V + "card")
    assert len(doc.triples) == 4
    assert all(s == Iri(V + "card#me") for s, _, _ in doc.triples)


def test_profile_with_pin_prefix_uses_other_namespace():
    doc = parse_turtle(fixture_text("profile_pin_prefix.ttl"), V + "card")
    assert Iri("http://www.w3.org/ns/pin/space#storage") in {p for _, p, _ in doc.triples}


def test_type_index_document():
    doc = parse_turtle(fixture_text("typeindex.ttl"), V + "publicTypeIndex.ttl")
    assert len(doc.triples) == 8
    reg = Iri(V + "publicTypeIndex.ttl#ab09fd")
    triple = next(t for t in doc.triples if t.subject == reg and t.object == Iri(V + "public/posts.ttl"))
    assert iris_of(triple) == {reg, Iri("http://www.w3.org/ns/solid/terms#instance"), Iri(V + "public/posts.ttl")}


def test_malformed_type_index_is_rejected_with_position():
    with pytest.raises(ParseError) as err:
        parse_turtle(fixture_text("typeindex_malformed.ttl"), V)
    assert (err.value.line, err.value.column) == (3, 12)


@pytest.mark.parametrize("text", [
    "<a> <b> .",
    "<a> <b> <c>",
    "x:a <b> <c>.",
    "<a> <b> (1 2).",
    "<a> <b> 1e5.",
    '<a> <b> "unterminated.',
])
def test_malformed_input_raises(text):
    with pytest.raises(ParseError):
        parse_turtle(text, V)


def test_relative_base_rejected():
    with pytest.raises(ValueError):
        parse_turtle("", "relative/path")


def test_anonymous_blank_nodes_are_fresh_and_document_scoped():
    text = "<a> <p> [ <q> 1 ], [ <q> 2 ]."
    one = parse_turtle(text, "http://one/doc")
    two = parse_turtle(text, "http://two/doc")
    blanks_one = {o for s, p, o in one.triples if p == Iri("http://one/p")}
    assert len(blanks_one) == 2
    blanks_two = {o for s, p, o in two.triples if p == Iri("http://two/p")}
    assert not blanks_one & blanks_two


def test_literals():
    doc = parse_turtle('<a> <p> "x"@EN, 5, 1.5, true, "d"^^<http://t>.', V)
    objects = [o for _, _, o in doc.triples]
    assert objects[0] == Literal("x", language="en")
    assert objects[0].datatype == RDF_LANGSTRING
    assert objects[1].datatype.value.endswith("#integer")
    assert objects[2].datatype.value.endswith("#decimal")
    assert objects[3].datatype.value.endswith("#boolean")
    assert objects[4].datatype == Iri("http://t")


def test_strip_fragment():
    assert strip_fragment(Iri("http://x/card#me")) == Iri("http://x/card")
    assert strip_fragment(Iri("http://x/card")) == Iri("http://x/card")


def test_iris_of_ignores_blank_and_literal():
    t = Triple(BlankNode("b1", "http://d"), Iri("http://p"), Literal("lit"))
    assert iris_of(t) == {Iri("http://p")}
    assert iris_of(Triple(Iri("http://a"), Iri("http://p"), Iri("http://b"))) == {
        Iri("http://a"), Iri("http://p"), Iri("http://b")}


def test_triple_positions_validated():
    with pytest.raises((TypeError, ValueError)):
        make_triple(Literal("x"), Iri("http://p"), Iri("http://o"))
    with pytest.raises((TypeError, ValueError)):
        make_triple(Iri("http://s"), BlankNode("b"), Iri("http://o"))


def test_iri_must_be_absolute():
    with pytest.raises(ValueError):
        Iri("relative")


def test_ntriples_term_syntax():
    line = to_ntriples([Triple(Iri("http://s"), Iri("http://p"), Literal("5", Iri("http://t")))])
    assert line.strip() == '<http://s> <http://p> "5"^^<http://t> .'


# -- properties -----------------------------------------------------------

_names = st.sampled_from(["a", "b", "c", "d/e", "f#g"])
_iris = _names.map(lambda n: Iri("http://h.example/" + n))
_literals = st.one_of(
    st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=8).map(Literal),
    st.integers(-50, 50).map(lambda n: Literal(str(n), Iri("http://www.w3.org/2001/XMLSchema#integer"))),
    st.tuples(st.text("abc", min_size=1, max_size=3), st.sampled_from(["en", "nl"])).map(
        lambda p: Literal(p[0], language=p[1])),
)
_blanks = st.sampled_from(["x", "y"]).map(lambda l: BlankNode(l, "http://h.example/doc"))
_triples = st.builds(Triple, st.one_of(_iris, _blanks), _iris, st.one_of(_iris, _blanks, _literals))


@settings(max_examples=300)
@given(st.lists(_triples, max_size=12))
def test_serialize_then_parse_round_trips(triples):
    text = serialize_turtle(triples, {"h": "http://h.example/"}, root="http://h.example/")
    again = parse_turtle(text, "http://h.example/doc")
    assert set(again.triples) == set(triples)
    assert parse_turtle(text, "http://h.example/doc") == again  # deterministic


@settings(max_examples=200)
@given(_triples)
def test_iris_of_only_iris(t):
    assert all(isinstance(i, Iri) for i in iris_of(t))
