"""Query dialect: basic graph patterns with predicate alternation.

Grammar accepted by :func:`parse_query`::

    PREFIX p: <iri> ...
    SELECT [DISTINCT] (?v ... | *) WHERE { patterns } [LIMIT n]

Patterns use ``.``, ``;`` and ``,`` separators, ``a``, ``|`` between
predicate IRIs, and ``[ ... ]`` blank-node property lists. Blank nodes in
a query become non-projected variables whose names start with ``_:``, which
no surface variable can collide with.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from .lexer import ParseError, Token, TokenStream, tokenize
from .rdf import RDF_TYPE, BlankNode, Iri, Literal, Term, Triple, strip_fragment
from .turtle import _TermReader


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def n3(self) -> str:
        return self.name if self.name.startswith("_:") else f"?{self.name}"

    @property
    def anonymous(self) -> bool:
        return self.name.startswith("_:")


@dataclass(frozen=True, slots=True)
class PredicatePath:
    alternatives: tuple[Iri, ...]

    def __post_init__(self):
        if not self.alternatives:
            raise ValueError("a predicate path needs at least one alternative")

    def n3(self) -> str:
        return "|".join(a.n3() for a in self.alternatives)


PatternTerm = Union[Variable, Iri, BlankNode, Literal, PredicatePath]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def __iter__(self) -> Iterator[PatternTerm]:
        yield self.subject
        yield self.predicate
        yield self.object

    def variables(self) -> set[Variable]:
        return {t for t in self if isinstance(t, Variable)}

    def n3(self) -> str:
        return " ".join(t.n3() for t in self) + " ."


Bgp = tuple[TriplePattern, ...]


@dataclass(frozen=True)
class Query:
    projection: tuple[Variable, ...]
    bgp: Bgp
    distinct: bool = False
    limit: int | None = None

    def __post_init__(self):
        if self.limit is not None and self.limit < 1:
            raise ValueError("LIMIT must be a positive integer")
        missing = set(self.projection) - bgp_variables(self.bgp)
        if missing:
            names = ", ".join(sorted(v.n3() for v in missing))
            raise ValueError(f"projected variables not used in the pattern: {names}")


class SolutionMapping(Mapping[Variable, Term]):
    """Immutable, hashable partial mapping from variables to terms."""

    __slots__ = ("_data", "_hash")

    def __init__(self, data: Mapping[Variable, Term] | Iterable[tuple[Variable, Term]] = ()):
        self._data = dict(data)
        self._hash = None

    def __getitem__(self, key: Variable) -> Term:
        return self._data[key]

    def __iter__(self):
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, SolutionMapping):
            return self._data == other._data
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k.n3()}: {v.n3()}" for k, v in self._data.items())
        return f"SolutionMapping({{{inner}}})"

    def project(self, variables: Iterable[Variable]) -> "SolutionMapping":
        return SolutionMapping((v, self._data[v]) for v in variables if v in self._data)

    def merge(self, other: Mapping[Variable, Term]) -> "SolutionMapping":
        data = dict(self._data)
        data.update(other)
        return SolutionMapping(data)

    def to_json(self) -> dict[str, str]:
        return {k.name: v.n3() for k, v in self._data.items()}


def bgp_variables(bgp: Iterable[TriplePattern]) -> set[Variable]:
    out: set[Variable] = set()
    for tp in bgp:
        out |= tp.variables()
    return out


def match_pattern(t: Triple, tp: TriplePattern) -> SolutionMapping | None:
    """Return the minimal mapping that turns ``tp`` into ``t``, or None."""
    bindings: dict[Variable, Term] = {}
    for term, pattern in zip(t, tp):
        if isinstance(pattern, Variable):
            bound = bindings.get(pattern)
            if bound is None:
                bindings[pattern] = term
            elif bound != term:
                return None
        elif isinstance(pattern, PredicatePath):
            if term not in pattern.alternatives:
                return None
        elif pattern != term:
            return None
    return SolutionMapping(bindings)


def apply_mapping(mu: Mapping[Variable, Term], tp: TriplePattern) -> TriplePattern:
    def sub(term):
        return mu.get(term, term) if isinstance(term, Variable) else term

    return TriplePattern(sub(tp.subject), sub(tp.predicate), sub(tp.object))


def _is_type_predicate(p: PatternTerm) -> bool:
    return p == RDF_TYPE or (isinstance(p, PredicatePath) and p.alternatives == (RDF_TYPE,))


def query_classes(bgp: Iterable[TriplePattern]) -> tuple[set[Iri], bool]:
    """Classes named in ``rdf:type`` patterns, and whether any subject is untyped."""
    classes: set[Iri] = set()
    subjects = []
    typed = set()
    for tp in bgp:
        subjects.append(tp.subject)
        if _is_type_predicate(tp.predicate):
            typed.add(tp.subject)
            if isinstance(tp.object, Iri):
                classes.add(tp.object)
    return classes, any(s not in typed for s in subjects)


def query_seed_iris(query: Query) -> set[Iri]:
    """Fragment-stripped IRIs in subject and object positions."""
    seeds = set()
    for tp in query.bgp:
        for term in (tp.subject, tp.object):
            if isinstance(term, Iri):
                seeds.add(strip_fragment(term))
    return seeds


# -- parsing ---------------------------------------------------------------


class _QueryParser(_TermReader):
    def __init__(self, text: str):
        super().__init__(TokenStream(tokenize(text, allow_vars=True), text), base="")
        self.patterns: list[TriplePattern] = []
        self._anon = 0
        self._order: list[Variable] = []

    def parse(self) -> Query:
        stream = self.stream
        while self.directive():
            pass
        select = stream.peek()
        if not stream.at_keyword("SELECT"):
            raise stream.error("expected SELECT")
        stream.next()
        distinct = False
        if stream.at_keyword("DISTINCT"):
            stream.next()
            distinct = True
        projection: list[Variable] | None = []
        if stream.accept("PUNCT", "*"):
            projection = None
        else:
            while stream.at("VAR"):
                projection.append(Variable(stream.next().value[1:]))
            if not projection:
                raise stream.error("expected projected variables or '*'")
        if stream.at_keyword("WHERE"):
            stream.next()
        stream.expect("PUNCT", "{")
        self.group()
        stream.expect("PUNCT", "}")
        limit = None
        if stream.at_keyword("LIMIT"):
            stream.next()
            token = stream.expect("NUMBER")
            if not token.value.isdigit() or int(token.value) < 1:
                raise stream.error("LIMIT must be a positive integer", token)
            limit = int(token.value)
        if not stream.at("EOF"):
            raise stream.error(f"unexpected {stream.peek().value!r} after query")
        if projection is None:
            projection = [v for v in self._order if not v.anonymous]
        try:
            return Query(tuple(projection), tuple(self.patterns), distinct, limit)
        except ValueError as exc:
            raise ParseError(str(exc), select.line, select.column) from None

    def group(self) -> None:
        stream = self.stream
        while not stream.at("PUNCT", "}"):
            if stream.at("PUNCT", "["):
                subject = self.blank_property_list()
                if not (stream.at("PUNCT", ".") or stream.at("PUNCT", "}")):
                    self.property_list(subject)
            else:
                self.property_list(self.node(stream.next()))
            if not stream.accept("PUNCT", "."):
                break

    def node(self, token: Token) -> PatternTerm:
        if token.kind == "VAR":
            return self._var(token.value[1:])
        if token.kind == "BNODE":
            return self._var("_:" + token.value[2:])
        if token.kind in ("IRI", "PNAME"):
            return self.iri(token)
        raise ParseError(f"unexpected {token.value or token.kind!r}", token.line, token.column)

    def _var(self, name: str) -> Variable:
        var = Variable(name)
        if var not in self._order:
            self._order.append(var)
        return var

    def property_list(self, subject: PatternTerm) -> None:
        stream = self.stream
        while True:
            predicate = self.verb()
            while True:
                self.patterns.append(TriplePattern(subject, predicate, self.object()))
                if not stream.accept("PUNCT", ","):
                    break
            if not stream.accept("PUNCT", ";"):
                return
            while stream.accept("PUNCT", ";"):
                pass
            if stream.at("PUNCT", ".") or stream.at("PUNCT", "]") or stream.at("PUNCT", "}"):
                return

    def verb(self) -> PatternTerm:
        stream = self.stream
        token = stream.next()
        if token.kind == "VAR":
            return self._var(token.value[1:])
        alternatives = [self._path_iri(token)]
        while stream.accept("PUNCT", "|"):
            alternatives.append(self._path_iri(stream.next()))
        if len(alternatives) == 1:
            return alternatives[0]
        return PredicatePath(tuple(dict.fromkeys(alternatives)))

    def _path_iri(self, token: Token) -> Iri:
        if token.kind == "WORD" and token.value == "a":
            return RDF_TYPE
        return self.iri(token)

    def object(self) -> PatternTerm:
        stream = self.stream
        if stream.at("PUNCT", "["):
            return self.blank_property_list()
        if self.at_literal():
            return self.literal()
        return self.node(stream.next())

    def blank_property_list(self) -> Variable:
        stream = self.stream
        stream.expect("PUNCT", "[")
        var = self._var(f"_:b{self._anon}")
        self._anon += 1
        if not stream.accept("PUNCT", "]"):
            self.property_list(var)
            stream.expect("PUNCT", "]")
        return var


def parse_query(text: str) -> Query:
    return _QueryParser(text).parse()


def instantiate(template: str, **params: str) -> str:
    """Fill ``$name`` / ``${name}`` placeholders of a query template."""
    return string.Template(template).safe_substitute(params)


def serialize_query(query: Query) -> str:
    head = "SELECT " + ("DISTINCT " if query.distinct else "")
    head += " ".join(v.n3() for v in query.projection) or "*"
    body = "\n".join("  " + tp.n3() for tp in query.bgp)
    tail = f" LIMIT {query.limit}" if query.limit is not None else ""
    return f"{head} WHERE {{\n{body}\n}}{tail}\n"
