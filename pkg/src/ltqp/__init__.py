"""Link-traversal query processing over Solid-style decentralized data vaults."""
from .execution import (
    EngineConfig,
    PhysicalPlan,
    ResultStream,
    evaluate_two_phase,
    execute,
    plan_bgp,
    plan_by_cardinality,
    run_query,
)
from .extractors import ExtractionContext, LinkExtractor, PhiMode, configure, phi_query_class
from .lexer import ParseError
from .query import Query, SolutionMapping, TriplePattern, Variable, instantiate, parse_query
from .rdf import BlankNode, Iri, Literal, ParsedDocument, Triple
from .traversal import (
    FetchPolicy,
    HttpTransport,
    Link,
    LinkQueue,
    MemoryTransport,
    TripleSource,
    dereference,
    run_traversal,
)
from .turtle import parse_turtle, serialize_turtle

__all__ = [
    "BlankNode", "EngineConfig", "ExtractionContext", "FetchPolicy", "HttpTransport", "Iri", "Link",
    "LinkExtractor", "LinkQueue", "Literal", "MemoryTransport", "ParseError", "ParsedDocument", "PhiMode",
    "PhysicalPlan", "Query", "ResultStream", "SolutionMapping", "Triple", "TriplePattern", "TripleSource",
    "Variable", "configure", "dereference", "evaluate_two_phase", "execute", "instantiate", "parse_query",
    "parse_turtle", "phi_query_class", "plan_bgp", "plan_by_cardinality", "run_query", "run_traversal",
    "serialize_turtle",
]
