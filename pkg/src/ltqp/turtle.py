"""Parser and writer for the Turtle subset used by data vaults.

Supported: ``@prefix``/``PREFIX``, ``@base``/``BASE``, ``a``, ``;`` and ``,``
lists, labelled and anonymous blank nodes, relative IRI references,
string/integer/decimal/boolean literals with language tags or datatypes,
and comments. Collections, long strings and exponents are rejected.
"""
from __future__ import annotations

from typing import Iterable, Mapping
from urllib.parse import urljoin

from .lexer import ParseError, Token, TokenStream, tokenize, unescape_string
from .rdf import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    BlankNode,
    Iri,
    Literal,
    ParsedDocument,
    Term,
    Triple,
    escape_string,
    is_absolute,
)

__all__ = ["ParseError", "parse_turtle", "resolve_iri", "serialize_turtle"]


def resolve_iri(reference: str, base: str) -> str:
    if is_absolute(reference):
        return reference
    resolved = urljoin(base, reference)
    # urljoin discards an empty fragment; namespace IRIs such as </vocab#> need it.
    if reference.endswith("#") and not resolved.endswith("#"):
        resolved += "#"
    return resolved


class _TermReader:
    """Term-level grammar shared with the query parser."""

    def __init__(self, stream: TokenStream, base: str, prefixes: dict[str, str] | None = None):
        self.stream = stream
        self.base = base
        self.prefixes: dict[str, str] = dict(prefixes or {})

    def iri(self, token: Token) -> Iri:
        if token.kind == "IRI":
            ref = token.value[1:-1]
            if not self.base and not is_absolute(ref):
                raise ParseError(f"relative IRI <{ref}> without a base", token.line, token.column)
            return Iri(resolve_iri(ref, self.base) if self.base else ref)
        if token.kind == "PNAME":
            prefix, _, local = token.value.partition(":")
            if prefix not in self.prefixes:
                raise ParseError(f"undeclared prefix {prefix!r}", token.line, token.column)
            return Iri(self.prefixes[prefix] + local.replace("\\", ""))
        raise ParseError(f"expected an IRI, found {token.value!r}", token.line, token.column)

    def literal(self) -> Literal:
        token = self.stream.next()
        if token.kind == "NUMBER":
            datatype = XSD_DECIMAL if "." in token.value else XSD_INTEGER
            return Literal(token.value, datatype)
        if token.kind == "WORD" and token.value in ("true", "false"):
            return Literal(token.value, XSD_BOOLEAN)
        if token.kind != "STRING":
            raise ParseError(f"expected a literal, found {token.value!r}", token.line, token.column)
        lexical = unescape_string(token)
        lang = self.stream.accept("LANG")
        if lang is not None:
            return Literal(lexical, language=lang.value[1:])
        if self.stream.accept("DTYPE"):
            return Literal(lexical, self.iri(self.stream.next()))
        return Literal(lexical)

    def at_literal(self) -> bool:
        token = self.stream.peek()
        return token.kind in ("STRING", "NUMBER") or (token.kind == "WORD" and token.value in ("true", "false"))

    def directive(self) -> bool:
        """Consume a prefix/base directive if one starts here."""
        stream = self.stream
        token = stream.peek()
        if token.kind == "LANG" and token.value in ("@prefix", "@base"):
            stream.next()
            self._directive_body(token.value[1:])
            stream.expect("PUNCT", ".")
            return True
        if token.kind == "WORD" and token.value.upper() in ("PREFIX", "BASE"):
            stream.next()
            self._directive_body(token.value.lower())
            return True
        return False

    def _directive_body(self, kind: str) -> None:
        stream = self.stream
        if kind == "prefix":
            name = stream.expect("PNAME")
            prefix, _, local = name.value.partition(":")
            if local:
                raise stream.error("prefix declaration must end with ':'", name)
            self.prefixes[prefix] = self.iri(stream.expect("IRI")).value
        else:
            token = stream.expect("IRI")
            ref = token.value[1:-1]
            self.base = resolve_iri(ref, self.base) if self.base else ref


class _TurtleParser(_TermReader):
    def __init__(self, text: str, base: str):
        tokens = tokenize(text)
        super().__init__(TokenStream(tokens, text), base)
        self.document_url = base
        used = {t.value[2:] for t in tokens if t.kind == "BNODE"}
        self._fresh = (f"g{n}" for n in _counter() if f"g{n}" not in used)
        self.triples: list[Triple] = []

    def parse(self) -> list[Triple]:
        stream = self.stream
        while not stream.at("EOF"):
            if self.directive():
                continue
            self.statement()
            stream.expect("PUNCT", ".")
        return self.triples

    def statement(self) -> None:
        stream = self.stream
        if stream.at("PUNCT", "["):
            subject = self.blank_property_list()
            if stream.at("PUNCT", "."):
                return
        else:
            subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self) -> Term:
        token = self.stream.next()
        if token.kind == "BNODE":
            return self.blank(token.value[2:])
        if token.kind in ("IRI", "PNAME"):
            return self.iri(token)
        raise ParseError(f"unexpected {token.value or token.kind!r} in subject position", token.line, token.column)

    def blank(self, label: str) -> BlankNode:
        return BlankNode(label, self.document_url)

    def predicate_object_list(self, subject: Term) -> None:
        stream = self.stream
        while True:
            predicate = self.verb()
            self.object_list(subject, predicate)
            if not stream.accept("PUNCT", ";"):
                return
            while stream.accept("PUNCT", ";"):
                pass
            if stream.at("PUNCT", ".") or stream.at("PUNCT", "]"):
                return

    def verb(self) -> Iri:
        token = self.stream.next()
        if token.kind == "WORD" and token.value == "a":
            return RDF_TYPE
        if token.kind in ("IRI", "PNAME"):
            return self.iri(token)
        raise ParseError(f"expected a predicate, found {token.value or token.kind!r}", token.line, token.column)

    def object_list(self, subject: Term, predicate: Iri) -> None:
        while True:
            obj = self.object()
            self.triples.append(Triple(subject, predicate, obj))
            if not self.stream.accept("PUNCT", ","):
                return

    def object(self) -> Term:
        stream = self.stream
        token = stream.peek()
        if token.kind == "PUNCT" and token.value == "[":
            return self.blank_property_list()
        if token.kind == "PUNCT" and token.value == "(":
            raise stream.error("collections are not supported")
        if self.at_literal():
            return self.literal()
        return self.subject()

    def blank_property_list(self) -> BlankNode:
        stream = self.stream
        stream.expect("PUNCT", "[")
        node = self.blank(next(self._fresh))
        if not stream.accept("PUNCT", "]"):
            self.predicate_object_list(node)
            stream.expect("PUNCT", "]")
        return node


def _counter():
    n = 0
    while True:
        yield n
        n += 1


def parse_turtle(text: str, base: Iri | str) -> ParsedDocument:
    """Parse ``text`` into a document whose IRIs are resolved against ``base``.

    Raises :class:`ParseError` with line and column on malformed input.
    """
    base_value = base.value if isinstance(base, Iri) else base
    if not is_absolute(base_value):
        raise ValueError(f"base IRI must be absolute: {base_value!r}")
    triples = _TurtleParser(text, base_value).parse()
    return ParsedDocument(Iri(base_value), tuple(triples))


def _term_text(term: Term, prefixes: Mapping[str, str], root: str | None) -> str:
    if isinstance(term, Iri):
        value = term.value
        for prefix, namespace in prefixes.items():
            if value.startswith(namespace):
                local = value[len(namespace):]
                if local and all(c.isalnum() or c in "_-" for c in local):
                    return f"{prefix}:{local}"
        if root and value.startswith(root):
            return f"</{value[len(root):]}>"
        return f"<{value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if term.language is not None:
        return f'"{escape_string(term.lexical)}"@{term.language}'
    if term.datatype == XSD_INTEGER and term.lexical.lstrip("+-").isdigit():
        return term.lexical
    quoted = f'"{escape_string(term.lexical)}"'
    if term.datatype.value.endswith("#string"):
        return quoted
    return f"{quoted}^^{_term_text(term.datatype, prefixes, root)}"


def serialize_turtle(
    triples: Iterable[Triple],
    prefixes: Mapping[str, str] | None = None,
    root: str | None = None,
) -> str:
    """Write triples as Turtle, one subject block per run of equal subjects.

    IRIs under ``root`` (a server origin such as ``http://host:3000/``) are
    written host-relative, so the output does not depend on where it is served.
    """
    prefixes = dict(prefixes or {})
    lines = [f"@prefix {p}: {_term_text(Iri(ns), {}, root)}." for p, ns in prefixes.items()]
    previous = None
    for s, p, o in triples:
        if s == previous:
            lines[-1] = lines[-1][:-1] + ";"
            lines.append(f"    {_verb(p, prefixes, root)} {_term_text(o, prefixes, root)}.")
        else:
            lines.append(f"{_term_text(s, prefixes, root)} {_verb(p, prefixes, root)} {_term_text(o, prefixes, root)}.")
        previous = s
    return "\n".join(lines) + ("\n" if lines else "")


def _verb(p: Iri, prefixes: Mapping[str, str], root: str | None) -> str:
    return "a" if p == RDF_TYPE else _term_text(p, prefixes, root)
