"""BGP planning and pipelined evaluation over a growing triple source.

Joins are symmetric hash joins arranged left-deep: step ``i`` keeps a table of
partial solutions over patterns ``0..i-1`` and a table of matches for pattern
``i``, both keyed on their shared variables. Every arriving tuple is inserted
into its own side and probed against the other, so a triple that shows up
late still meets every earlier partial result exactly once.
"""
from __future__ import annotations

import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .extractors import DEFAULT_EXCLUDED_NAMESPACES, ExtractionContext, configure
from .query import (
    Bgp,
    PredicatePath,
    Query,
    SolutionMapping,
    TriplePattern,
    Variable,
    match_pattern,
    query_seed_iris,
)
from .rdf import RDF_TYPE, Iri, strip_fragment
from .traversal import (
    FetchPolicy,
    LinkQueue,
    TraversalReport,
    Transport,
    TripleSource,
    run_traversal,
)

DEFAULT_QUERY_TIMEOUT_MS = 120_000


@dataclass(frozen=True)
class PlanStep:
    pattern: TriplePattern
    shared: tuple[Variable, ...]

    @property
    def strategy(self) -> str:
        return "symmetric-hash" if self.shared else "cartesian"


@dataclass(frozen=True)
class PhysicalPlan:
    steps: tuple[PlanStep, ...]

    @property
    def ordered_patterns(self) -> list[TriplePattern]:
        return [s.pattern for s in self.steps]


def plan_from_order(order: Sequence[TriplePattern]) -> PhysicalPlan:
    """Plan that joins the patterns in exactly the given order."""
    bound: set[Variable] = set()
    steps = []
    for tp in order:
        shared = tuple(sorted(tp.variables() & bound, key=lambda v: v.name))
        steps.append(PlanStep(tp, shared))
        bound |= tp.variables()
    return PhysicalPlan(tuple(steps))


def _is_type_pattern(tp: TriplePattern) -> bool:
    p = tp.predicate
    return p == RDF_TYPE or (isinstance(p, PredicatePath) and RDF_TYPE in p.alternatives)


def _mentions_seed(tp: TriplePattern, seeds: set[Iri]) -> bool:
    return any(isinstance(t, Iri) and strip_fragment(t) in seeds for t in (tp.subject, tp.object))


def plan_bgp(bgp: Bgp, seeds: Iterable[Iri] = (), discovery: str = "ldp-idx-filt") -> PhysicalPlan:
    """Zero-knowledge greedy join order.

    After the first step only patterns sharing a variable with what is already
    bound are eligible (if any are). Among eligible patterns the order is:
    patterns naming a seed IRI, then rdf:type patterns last (first when the
    filtered type index is in use), then fewest unbound variables, then
    textual order.
    """
    if not bgp:
        raise ValueError("cannot plan an empty BGP")
    seeds = {strip_fragment(s) for s in seeds}
    prefer_types = discovery.endswith("idx-filt")
    remaining = list(enumerate(bgp))
    order: list[TriplePattern] = []
    bound: set[Variable] = set()

    def score(item):
        index, tp = item
        type_rank = 0 if _is_type_pattern(tp) == prefer_types else 1
        return (0 if _mentions_seed(tp, seeds) else 1, type_rank, len(tp.variables() - bound), index)

    while remaining:
        eligible = [it for it in remaining if it[1].variables() & bound] if order else remaining
        best = min(eligible or remaining, key=score)
        remaining.remove(best)
        order.append(best[1])
        bound |= best[1].variables()
    return plan_from_order(order)


def pattern_cardinality(tp: TriplePattern, source: TripleSource) -> int:
    s = None if isinstance(tp.subject, Variable) else tp.subject
    o = None if isinstance(tp.object, Variable) else tp.object
    predicates: list = [None] if isinstance(tp.predicate, Variable) else (
        list(tp.predicate.alternatives) if isinstance(tp.predicate, PredicatePath) else [tp.predicate])
    return sum(1 for p in predicates for t in source.match(s, p, o) if match_pattern(t, tp) is not None)


def plan_by_cardinality(bgp: Bgp, source: TripleSource) -> PhysicalPlan:
    """Greedy ascending-cardinality order measured on a completed store."""
    if not bgp:
        raise ValueError("cannot plan an empty BGP")
    counts = {i: pattern_cardinality(tp, source) for i, tp in enumerate(bgp)}
    remaining = list(range(len(bgp)))
    order = []
    bound: set[Variable] = set()
    while remaining:
        eligible = [i for i in remaining if bgp[i].variables() & bound] if order else remaining
        best = min(eligible or remaining, key=lambda i: (counts[i], i))
        remaining.remove(best)
        order.append(bgp[best])
        bound |= bgp[best].variables()
    return plan_from_order(order)


class _Pipeline:
    def __init__(self, plan: PhysicalPlan):
        self.steps = plan.steps
        n = len(self.steps)
        self.left = [defaultdict(list) for _ in range(n)]
        self.right = [defaultdict(list) for _ in range(n)]
        self.produced = [0] * n
        self.out: list[SolutionMapping] = []
        self._seen_triples = set()

    def push_triple(self, t) -> None:
        if t in self._seen_triples:
            return
        self._seen_triples.add(t)
        for i, step in enumerate(self.steps):
            mu = match_pattern(t, step.pattern)
            if mu is None:
                continue
            if i == 0:
                self._emit(0, mu)
            else:
                key = tuple(mu[v] for v in step.shared)
                self.right[i][key].append(mu)
                for partial in self.left[i].get(key, ()):
                    self._emit(i, partial.merge(mu))

    def _emit(self, level: int, mu: SolutionMapping) -> None:
        self.produced[level] += 1
        nxt = level + 1
        if nxt == len(self.steps):
            self.out.append(mu)
            return
        key = tuple(mu[v] for v in self.steps[nxt].shared)
        self.left[nxt][key].append(mu)
        for match in self.right[nxt].get(key, ()):
            self._emit(nxt, mu.merge(match))


@dataclass
class ExecutionStats:
    count: int = 0
    t_first_ms: float | None = None
    t_last_ms: float | None = None
    elapsed_ms: float = 0.0
    arrivals_ms: list[float] = field(default_factory=list)
    intermediate_results: int = 0
    timed_out: bool = False


class ResultStream:
    """Iterator of projected solution mappings with terminal statistics."""

    def __init__(self, generator_factory, stats: ExecutionStats):
        self._factory = generator_factory
        self.stats = stats
        self.report: TraversalReport | None = None
        self.plan: PhysicalPlan | None = None
        self._iterator = None

    def __iter__(self) -> Iterator[SolutionMapping]:
        if self._iterator is None:
            self._iterator = self._factory(self)
        return self._iterator

    def collect(self) -> list[SolutionMapping]:
        return list(self)

    def summary(self) -> dict:
        s = self.stats
        return {
            "count": s.count,
            "tFirst": s.t_first_ms,
            "tLast": s.t_last_ms,
            "elapsed": s.elapsed_ms,
            "wireRequests": self.report.wire_requests if self.report else 0,
            "timedOut": s.timed_out,
        }


def execute(
    query: Query,
    plan: PhysicalPlan,
    source: TripleSource,
    stop: threading.Event | None = None,
    timeout_ms: float | None = DEFAULT_QUERY_TIMEOUT_MS,
    started: float | None = None,
) -> ResultStream:
    """Evaluate ``plan`` over ``source`` while it grows.

    Sets ``stop`` once LIMIT is reached or the timeout expires, so a
    concurrently running traversal can halt.
    """
    stats = ExecutionStats()
    stop = stop or threading.Event()

    def run(stream: ResultStream):
        t0 = started if started is not None else time.perf_counter()
        deadline = None if timeout_ms is None else t0 + timeout_ms / 1000
        pipeline = _Pipeline(plan)
        cursor = source.cursor()
        seen = set()
        projection = query.projection
        try:
            while True:
                wait = None if deadline is None else deadline - time.perf_counter()
                if wait is not None and wait <= 0:
                    stats.timed_out = True
                    break
                batch = cursor.next_batch(timeout=wait)
                if batch is None:
                    break
                for t in batch:
                    pipeline.push_triple(t)
                    for mu in pipeline.out:
                        row = mu.project(projection)
                        if query.distinct:
                            if row in seen:
                                continue
                            seen.add(row)
                        now = (time.perf_counter() - t0) * 1000
                        stats.count += 1
                        stats.arrivals_ms.append(now)
                        if stats.t_first_ms is None:
                            stats.t_first_ms = now
                        stats.t_last_ms = now
                        yield row
                        if query.limit is not None and stats.count >= query.limit:
                            stop.set()
                            return
                    pipeline.out.clear()
        finally:
            stop.set()
            stats.intermediate_results = sum(pipeline.produced)
            stats.elapsed_ms = (time.perf_counter() - t0) * 1000

    return ResultStream(run, stats)


@dataclass
class EngineConfig:
    reachability: str = "cmatch"
    discovery: str = "ldp-idx-filt"
    lenient: bool = True
    timeout_ms: float | None = DEFAULT_QUERY_TIMEOUT_MS
    request_timeout_ms: int = 5000
    max_redirects: int = 5
    concurrency: int = 4
    excluded_namespaces: tuple[str, ...] = DEFAULT_EXCLUDED_NAMESPACES
    priority: object = None  # optional Callable[[Link], int] queue-ordering hook


def _traversal_setup(query: Query, seeds, config: EngineConfig):
    seeds = list(seeds) or sorted(query_seed_iris(query), key=lambda i: i.value)
    if not seeds:
        raise ValueError("no seeds: pass --seed or use a query that mentions an IRI")
    extractors, phi = configure(config.reachability, config.discovery)
    policy = FetchPolicy(timeout_ms=config.request_timeout_ms, lenient=config.lenient,
                         max_redirects=config.max_redirects)

    def context(document: Iri) -> ExtractionContext:
        return ExtractionContext(document, query.bgp, phi, config.excluded_namespaces)

    return seeds, extractors, policy, context


def run_query(
    query: Query,
    seeds: Iterable[Iri] = (),
    config: EngineConfig | None = None,
    transport: Transport | None = None,
) -> ResultStream:
    """Integrated execution: traverse and evaluate concurrently."""
    config = config or EngineConfig()
    seeds, extractors, policy, context = _traversal_setup(query, seeds, config)
    started = time.perf_counter()
    source = TripleSource()
    stop = threading.Event()
    plan = plan_bgp(query.bgp, seeds, config.discovery)
    stream = execute(query, plan, source, stop, config.timeout_ms, started)
    holder: dict = {}

    def traverse():
        try:
            holder["report"] = run_traversal(
                seeds, extractors, source, LinkQueue(config.priority), policy,
                context_factory=context, transport=transport,
                concurrency=config.concurrency, stop=stop)
        except BaseException as exc:  # surfaced through the source
            holder["error"] = exc

    thread = threading.Thread(target=traverse, name="traversal", daemon=True)
    inner = stream._factory

    def run(s: ResultStream):
        thread.start()
        try:
            yield from inner(s)
        finally:
            stop.set()
            thread.join()
            s.report = holder.get("report") or TraversalReport(wire_requests=policy.wire_requests)

    stream._factory = run
    stream.plan = plan
    return stream


def evaluate_two_phase(
    query: Query,
    seeds: Iterable[Iri] = (),
    config: EngineConfig | None = None,
    transport: Transport | None = None,
) -> ResultStream:
    """Traverse to completion, then plan on exact cardinalities and execute."""
    config = config or EngineConfig()
    seeds, extractors, policy, context = _traversal_setup(query, seeds, config)
    started = time.perf_counter()
    source = TripleSource()
    report = run_traversal(seeds, extractors, source, LinkQueue(config.priority), policy,
                           context_factory=context, transport=transport,
                           concurrency=config.concurrency)
    plan = plan_by_cardinality(query.bgp, source)
    stream = execute(query, plan, source, None, config.timeout_ms, started)
    stream.report = report
    stream.plan = plan
    return stream
