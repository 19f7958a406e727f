"""RDF terms, triples and small term utilities.

Terms are immutable and hashable. Blank nodes carry the URL of the document
they were parsed from, so two documents never share a blank node even when
their labels coincide.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
LDP = "http://www.w3.org/ns/ldp#"
PIM = "http://www.w3.org/ns/pim/space#"
SOLID = "http://www.w3.org/ns/solid/terms#"
FOAF = "http://xmlns.com/foaf/0.1/"

_SCHEME = re.compile(r"[A-Za-z][A-Za-z0-9+.-]*:")


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not _SCHEME.match(self.value):
            raise ValueError(f"IRI must be absolute: {self.value!r}")

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str
    scope: str = ""

    def n3(self) -> str:
        if not self.scope:
            return f"_:{self.label}"
        digest = hashlib.sha1(self.scope.encode("utf-8")).hexdigest()[:10]
        return f"_:{self.label}x{digest}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: Iri = None  # type: ignore[assignment]
    language: str | None = None

    def __post_init__(self):
        if self.language is not None:
            object.__setattr__(self, "language", self.language.lower())
            if self.datatype is not None and self.datatype != RDF_LANGSTRING:
                raise ValueError("language-tagged literal must have rdf:langString datatype")
            object.__setattr__(self, "datatype", RDF_LANGSTRING)
        elif self.datatype is None:
            object.__setattr__(self, "datatype", XSD_STRING)

    def n3(self) -> str:
        quoted = '"' + escape_string(self.lexical) + '"'
        if self.language is not None:
            return f"{quoted}@{self.language}"
        if self.datatype == XSD_STRING:
            return quoted
        return f"{quoted}^^{self.datatype.n3()}"


Term = Union[Iri, BlankNode, Literal]

RDF_TYPE = Iri(RDF + "type")
RDF_LANGSTRING = Iri(RDF + "langString")
XSD_STRING = Iri(XSD + "string")
XSD_INTEGER = Iri(XSD + "integer")
XSD_DECIMAL = Iri(XSD + "decimal")
XSD_BOOLEAN = Iri(XSD + "boolean")


class Triple(NamedTuple):
    subject: Term
    predicate: Iri
    object: Term

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


def make_triple(s: Term, p: Term, o: Term) -> Triple:
    """Build a triple, rejecting literal subjects and non-IRI predicates."""
    if isinstance(s, Literal):
        raise ValueError(f"literal in subject position: {s.n3()}")
    if not isinstance(p, Iri):
        raise ValueError(f"predicate must be an IRI, got {p.n3()}")
    return Triple(s, p, o)


@dataclass(frozen=True)
class ParsedDocument:
    url: Iri
    triples: tuple[Triple, ...]

    def __len__(self) -> int:
        return len(self.triples)


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def is_absolute(iri: str) -> bool:
    return bool(_SCHEME.match(iri))


def strip_fragment(iri: Iri) -> Iri:
    value = iri.value
    cut = value.find("#")
    if cut < 0:
        return iri
    return Iri(value[:cut])


def iris_of(triple: Triple) -> set[Iri]:
    return {term for term in triple if isinstance(term, Iri)}


def to_ntriples(triples: Iterable[Triple]) -> str:
    return "".join(t.n3() + "\n" for t in triples)
