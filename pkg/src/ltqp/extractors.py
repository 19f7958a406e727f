"""Link extractors: reachability criteria and Solid discovery selectors.

Each extractor maps a parsed document plus an :class:`ExtractionContext` to
a set of :class:`~ltqp.traversal.Link`. Subject-sensitive selectors compare
triple subjects with the IRI the document was *requested* as, fragment
included, so ``card#me`` and ``card`` behave differently.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable

from .query import Bgp, PredicatePath, Variable, match_pattern, query_classes
from .rdf import LDP, PIM, RDF, RDF_TYPE, RDFS, SOLID, XSD, Iri, ParsedDocument, iris_of
from .traversal import Link

PIM_STORAGE = Iri(PIM + "storage")
LDP_CONTAINS = Iri(LDP + "contains")
SOLID_PUBLIC_TYPE_INDEX = Iri(SOLID + "publicTypeIndex")
SOLID_PRIVATE_TYPE_INDEX = Iri(SOLID + "privateTypeIndex")
SOLID_TYPE_REGISTRATION = Iri(SOLID + "TypeRegistration")
SOLID_FOR_CLASS = Iri(SOLID + "forClass")
SOLID_INSTANCE = Iri(SOLID + "instance")
SOLID_INSTANCE_CONTAINER = Iri(SOLID + "instanceContainer")

DEFAULT_EXCLUDED_NAMESPACES = (RDF, RDFS, XSD, LDP, SOLID, PIM)

TYPE_INDEX_PRIORITY = 0
DEFAULT_PRIORITY = 1


class PhiMode(enum.Enum):
    ALL = "all"
    QUERY_CLASS = "query-class"


@dataclass(frozen=True)
class ExtractionContext:
    document: Iri
    bgp: Bgp = ()
    phi_mode: PhiMode = PhiMode.ALL
    excluded_namespaces: tuple[str, ...] = DEFAULT_EXCLUDED_NAMESPACES


@dataclass(frozen=True)
class LinkExtractor:
    label: str
    function: Callable[[ParsedDocument, ExtractionContext], set[Link]]

    def extract(self, doc: ParsedDocument, ctx: ExtractionContext) -> set[Link]:
        return self.function(doc, ctx)


def _links(targets: Iterable[Iri], doc: ParsedDocument, label: str, priority: int = DEFAULT_PRIORITY) -> set[Link]:
    return {Link(t, doc.url, label, priority) for t in targets}


def _allowed(iri: Iri, ctx: ExtractionContext) -> bool:
    return not iri.value.startswith(ctx.excluded_namespaces) if ctx.excluded_namespaces else True


def extract_cnone(doc: ParsedDocument, ctx: ExtractionContext) -> set[Link]:
    return set()


def extract_call(doc: ParsedDocument, ctx: ExtractionContext) -> set[Link]:
    targets = {iri for t in doc.triples for iri in iris_of(t) if _allowed(iri, ctx)}
    return _links(targets, doc, "call")


def extract_cmatch(doc: ParsedDocument, ctx: ExtractionContext) -> set[Link]:
    bgp = ctx.bgp
    targets = set()
    for t in doc.triples:
        if any(match_pattern(t, tp) is not None for tp in bgp):
            targets.update(iri for iri in iris_of(t) if _allowed(iri, ctx))
    return _links(targets, doc, "cmatch")


def extract_solid_vault(doc: ParsedDocument, ctx: ExtractionContext) -> set[Link]:
    targets = {o for s, p, o in doc.triples if p == PIM_STORAGE and s == ctx.document and isinstance(o, Iri)}
    return _links(targets, doc, "solid-vault")


def extract_ldp_container(doc: ParsedDocument, ctx: ExtractionContext) -> set[Link]:
    targets = {o for s, p, o in doc.triples if p == LDP_CONTAINS and s == ctx.document and isinstance(o, Iri)}
    return _links(targets, doc, "ldp-container")


def phi_query_class(bgp: Bgp, cls: Iri) -> bool:
    """Whether a type registration for ``cls`` is relevant to ``bgp``.

    True when some pattern could match ``?v rdf:type cls`` (type or variable
    predicate, ``cls`` or variable object), or when some subject of the BGP
    carries no ``rdf:type`` pattern at all.
    """
    classes, untyped = query_classes(bgp)
    if untyped or cls in classes:
        return True
    for tp in bgp:
        p = tp.predicate
        type_like = (isinstance(p, Variable) or p == RDF_TYPE
                     or (isinstance(p, PredicatePath) and RDF_TYPE in p.alternatives))
        if type_like and (isinstance(tp.object, Variable) or tp.object == cls):
            return True
    return False


def extract_type_index(doc: ParsedDocument, ctx: ExtractionContext) -> set[Link]:
    out: set[Link] = set()
    # WebID role: links from the requested subject to its type indexes.
    indexes = {o for s, p, o in doc.triples
               if s == ctx.document and p in (SOLID_PUBLIC_TYPE_INDEX, SOLID_PRIVATE_TYPE_INDEX) and isinstance(o, Iri)}
    out |= _links(indexes, doc, "type-index", TYPE_INDEX_PRIORITY)

    registrations = {s for s, p, o in doc.triples if p == RDF_TYPE and o == SOLID_TYPE_REGISTRATION}
    if not registrations:
        return out
    classes: dict = {}
    instances: dict = {}
    containers: dict = {}
    for s, p, o in doc.triples:
        if s not in registrations or not isinstance(o, Iri):
            continue
        if p == SOLID_FOR_CLASS:
            classes.setdefault(s, set()).add(o)
        elif p == SOLID_INSTANCE:
            instances.setdefault(s, set()).add(o)
        elif p == SOLID_INSTANCE_CONTAINER:
            containers.setdefault(s, set()).add(o)
    for reg in registrations:
        reg_classes = classes.get(reg, set())
        if ctx.phi_mode is PhiMode.QUERY_CLASS:
            if not any(phi_query_class(ctx.bgp, c) for c in reg_classes):
                continue
        elif not reg_classes:
            continue
        out |= _links(instances.get(reg, ()), doc, "type-index-instance", TYPE_INDEX_PRIORITY)
        out |= _links(containers.get(reg, ()), doc, "type-index-container", TYPE_INDEX_PRIORITY)
    return out


CNONE = LinkExtractor("cnone", extract_cnone)
CMATCH = LinkExtractor("cmatch", extract_cmatch)
CALL = LinkExtractor("call", extract_call)
SOLID_VAULT = LinkExtractor("solid-vault", extract_solid_vault)
LDP_CONTAINER = LinkExtractor("ldp-container", extract_ldp_container)
TYPE_INDEX = LinkExtractor("type-index", extract_type_index)

REACHABILITY = {"cnone": CNONE, "cmatch": CMATCH, "call": CALL}

# discovery mode -> (extractors, phi mode)
DISCOVERY = {
    "base": ((), PhiMode.ALL),
    "ldp": ((SOLID_VAULT, LDP_CONTAINER), PhiMode.ALL),
    "idx": ((LDP_CONTAINER, TYPE_INDEX), PhiMode.ALL),
    "idx-filt": ((LDP_CONTAINER, TYPE_INDEX), PhiMode.QUERY_CLASS),
    "ldp-idx": ((SOLID_VAULT, LDP_CONTAINER, TYPE_INDEX), PhiMode.ALL),
    "ldp-idx-filt": ((SOLID_VAULT, LDP_CONTAINER, TYPE_INDEX), PhiMode.QUERY_CLASS),
}


def configure(reachability: str, discovery: str) -> tuple[list[LinkExtractor], PhiMode]:
    """Extractor list and type-index filter for a (reachability, discovery) cell."""
    try:
        reach = REACHABILITY[reachability]
    except KeyError:
        raise ValueError(f"unknown reachability {reachability!r}; choose from {sorted(REACHABILITY)}") from None
    try:
        selectors, phi = DISCOVERY[discovery]
    except KeyError:
        raise ValueError(f"unknown discovery mode {discovery!r}; choose from {list(DISCOVERY)}") from None
    return [reach, *selectors], phi
