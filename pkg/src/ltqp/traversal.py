"""Link queue, dereferencer and the continuously growing triple source.

The traversal loop pops links from a :class:`LinkQueue`, dereferences them
(up to ``concurrency`` requests in flight), appends every parsed triple to a
:class:`TripleSource` and hands each document to the link extractors, whose
output is enqueued again. Query operators read the source through cursors
that first replay what was appended earlier.
"""
from __future__ import annotations

import heapq
import itertools
import logging
import threading
import time
import urllib.error
import urllib.request
from collections import defaultdict
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Protocol, Sequence

from .lexer import ParseError
from .rdf import Iri, ParsedDocument, Term, Triple, is_absolute, strip_fragment
from .turtle import parse_turtle

log = logging.getLogger(__name__)

SEED_LABEL = "seed"


@dataclass(frozen=True, slots=True)
class Link:
    target: Iri
    source_document: Iri | None = None
    extractor: str = SEED_LABEL
    priority: int = 1

    def __post_init__(self):
        if not is_absolute(self.target.value):
            raise ValueError(f"link target must be absolute: {self.target.value!r}")


class LinkQueue:
    """Priority-then-FIFO queue that never accepts the same document twice."""

    def __init__(self, priority: Callable[[Link], int] | None = None):
        self._heap: list[tuple[int, int, Link]] = []
        self._seen: set[Iri] = set()
        self._counter = itertools.count()
        self._priority = priority
        self._lock = threading.Lock()

    def enqueue(self, link: Link) -> bool:
        key = strip_fragment(link.target)
        with self._lock:
            if key in self._seen:
                return False
            self._seen.add(key)
            rank = self._priority(link) if self._priority else link.priority
            heapq.heappush(self._heap, (rank, next(self._counter), link))
            return True

    def pop(self) -> Link | None:
        with self._lock:
            if not self._heap:
                return None
            return heapq.heappop(self._heap)[2]

    @property
    def seen(self) -> frozenset[Iri]:
        with self._lock:
            return frozenset(self._seen)

    def __len__(self) -> int:
        with self._lock:
            return len(self._heap)


class SourceClosed(Exception):
    pass


class TripleSource:
    """Append-only triple store with S/P/O indexes and replaying cursors.

    Every cursor yields the full append sequence in the same order, starting
    from the first triple regardless of when it was created, and ends once
    the source is closed and drained.
    """

    def __init__(self):
        self._triples: list[Triple] = []
        self._by_subject: dict[Term, list[int]] = defaultdict(list)
        self._by_predicate: dict[Term, list[int]] = defaultdict(list)
        self._by_object: dict[Term, list[int]] = defaultdict(list)
        self._cond = threading.Condition()
        self._closed = False
        self.error: BaseException | None = None

    def append(self, triple: Triple) -> None:
        self.extend((triple,))

    def extend(self, triples: Iterable[Triple]) -> None:
        with self._cond:
            if self._closed:
                raise SourceClosed("append to a closed triple source")
            for t in triples:
                index = len(self._triples)
                self._triples.append(t)
                self._by_subject[t.subject].append(index)
                self._by_predicate[t.predicate].append(index)
                self._by_object[t.object].append(index)
            self._cond.notify_all()

    def close(self, error: BaseException | None = None) -> None:
        with self._cond:
            self._closed = True
            if error is not None and self.error is None:
                self.error = error
            self._cond.notify_all()

    @property
    def closed(self) -> bool:
        return self._closed

    def __len__(self) -> int:
        return len(self._triples)

    def snapshot(self) -> list[Triple]:
        with self._cond:
            return list(self._triples)

    def match(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> list[Triple]:
        """Triples currently stored that agree with the given positions."""
        with self._cond:
            candidates = [self._by_subject.get(s, []) if s is not None else None,
                          self._by_predicate.get(p, []) if p is not None else None,
                          self._by_object.get(o, []) if o is not None else None]
            bound = [c for c in candidates if c is not None]
            if not bound:
                return list(self._triples)
            smallest = min(bound, key=len)
            out = []
            for i in smallest:
                t = self._triples[i]
                if (s is None or t.subject == s) and (p is None or t.predicate == p) and (o is None or t.object == o):
                    out.append(t)
            return out

    def cursor(self) -> "SourceCursor":
        return SourceCursor(self)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.cursor())


class SourceCursor:
    def __init__(self, source: TripleSource):
        self._source = source
        self._position = 0

    def __iter__(self):
        return self

    def __next__(self) -> Triple:
        batch = self.next_batch(timeout=None, limit=1)
        if batch is None:
            raise StopIteration
        return batch[0]

    def next_batch(self, timeout: float | None = None, limit: int | None = None) -> list[Triple] | None:
        """Wait for unseen triples.

        Returns the new triples, an empty list if ``timeout`` elapsed first,
        or None once the source is closed and fully consumed.
        """
        source = self._source
        deadline = None if timeout is None else time.monotonic() + timeout
        with source._cond:
            while self._position >= len(source._triples):
                if source._closed:
                    if source.error is not None:
                        raise source.error
                    return None
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    return []
                source._cond.wait(remaining)
            end = len(source._triples) if limit is None else min(len(source._triples), self._position + limit)
            batch = source._triples[self._position:end]
            self._position = end
            return batch


# -- dereferencing ---------------------------------------------------------


@dataclass(frozen=True)
class Success:
    document: ParsedDocument


@dataclass(frozen=True)
class HttpError:
    code: int


@dataclass(frozen=True)
class NetworkError:
    message: str


@dataclass(frozen=True)
class DocumentParseError:
    message: str


@dataclass(frozen=True)
class DereferenceResult:
    requested_url: Iri
    final_url: Iri
    status: Success | HttpError | NetworkError | DocumentParseError
    elapsed_ms: float

    @property
    def ok(self) -> bool:
        return isinstance(self.status, Success)

    @property
    def document(self) -> ParsedDocument | None:
        return self.status.document if isinstance(self.status, Success) else None


@dataclass
class Response:
    status: int
    url: str
    body: bytes = b""


class Transport(Protocol):
    def get(self, url: str, accept: str, timeout: float, max_redirects: int) -> Response: ...


class TransportError(Exception):
    pass


class _LimitedRedirects(urllib.request.HTTPRedirectHandler):
    def __init__(self, limit: int):
        self.max_redirections = limit


class HttpTransport:
    """Plain HTTP/1.1 GET over urllib."""

    def get(self, url: str, accept: str, timeout: float, max_redirects: int) -> Response:
        if not url.startswith(("http://", "https://")):
            raise TransportError(f"unsupported scheme in {url}")
        opener = urllib.request.build_opener(_LimitedRedirects(max_redirects))
        request = urllib.request.Request(url, headers={"Accept": accept})
        try:
            with opener.open(request, timeout=timeout) as response:
                return Response(response.status, response.geturl(), response.read())
        except urllib.error.HTTPError as exc:
            return Response(exc.code, exc.geturl() or url)
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise TransportError(str(getattr(exc, "reason", exc))) from None


class MemoryTransport:
    """In-process web of documents, for tests and offline runs.

    ``documents`` maps fragment-free URLs to Turtle text; ``redirects`` maps
    URLs to other URLs; ``failures`` maps URLs to HTTP status codes.
    """

    def __init__(self, documents: Mapping[str, str | bytes],
                 redirects: Mapping[str, str] | None = None,
                 failures: Mapping[str, int] | None = None):
        self.documents = dict(documents)
        self.redirects = dict(redirects or {})
        self.failures = dict(failures or {})
        self.requests: list[str] = []
        self._lock = threading.Lock()

    def get(self, url: str, accept: str, timeout: float, max_redirects: int) -> Response:
        with self._lock:
            self.requests.append(url)
        hops = 0
        while url in self.redirects:
            hops += 1
            if hops > max_redirects:
                raise TransportError("too many redirects")
            url = self.redirects[url]
        if url in self.failures:
            return Response(self.failures[url], url)
        body = self.documents.get(url)
        if body is None:
            return Response(404, url)
        return Response(200, url, body.encode("utf-8") if isinstance(body, str) else body)


@dataclass
class FetchPolicy:
    accept: str = "text/turtle"
    timeout_ms: int = 5000
    lenient: bool = True
    max_redirects: int = 5
    cache: dict[Iri, DereferenceResult] = field(default_factory=dict)
    wire_requests: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def fresh(self) -> "FetchPolicy":
        """Same settings with an empty cache, for the next query execution."""
        return FetchPolicy(self.accept, self.timeout_ms, self.lenient, self.max_redirects)


def dereference(iri: Iri, policy: FetchPolicy, transport: Transport | None = None) -> DereferenceResult:
    url = strip_fragment(iri)
    cached = policy.cache.get(url)
    if cached is not None:
        return cached
    transport = transport or HttpTransport()
    with policy._lock:
        policy.wire_requests += 1
    started = time.perf_counter()
    final = url
    try:
        response = transport.get(url.value, policy.accept, policy.timeout_ms / 1000, policy.max_redirects)
        final = strip_fragment(Iri(response.url)) if response.url else url
        if 200 <= response.status < 300:
            try:
                text = response.body.decode("utf-8")
                status = Success(parse_turtle(text, final))
            except (ParseError, UnicodeDecodeError) as exc:
                status = DocumentParseError(str(exc))
        else:
            status = HttpError(response.status)
    except TransportError as exc:
        status = NetworkError(str(exc))
    result = DereferenceResult(url, final, status, (time.perf_counter() - started) * 1000)
    policy.cache[url] = result
    return result


# -- traversal loop --------------------------------------------------------


class TraversalError(RuntimeError):
    def __init__(self, result: DereferenceResult):
        super().__init__(f"failed to dereference {result.requested_url.value}: {result.status}")
        self.result = result


@dataclass
class TraversalReport:
    documents_fetched: int = 0
    wire_requests: int = 0
    errors_ignored: int = 0
    wall_time_ms: float = 0.0
    stopped: bool = False
    fetched: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


class Extractor(Protocol):
    label: str

    def extract(self, doc: ParsedDocument, ctx) -> set[Link]: ...


def run_traversal(
    seeds: Iterable[Iri],
    extractors: Sequence[Extractor],
    source: TripleSource,
    queue: LinkQueue | None = None,
    policy: FetchPolicy | None = None,
    *,
    context_factory: Callable[[Iri], object] | None = None,
    transport: Transport | None = None,
    concurrency: int = 4,
    stop: threading.Event | None = None,
    close_source: bool = True,
) -> TraversalReport:
    """Follow links from ``seeds`` until the queue drains or ``stop`` is set.

    ``context_factory`` builds the extraction context for a document from the
    IRI it was requested as (fragment included).
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("no seeds")
    queue = queue if queue is not None else LinkQueue()
    policy = policy if policy is not None else FetchPolicy()
    transport = transport or HttpTransport()
    stop = stop or threading.Event()
    report = TraversalReport()
    started = time.perf_counter()
    for iri in seeds:
        queue.enqueue(Link(iri))

    error: BaseException | None = None
    pool = ThreadPoolExecutor(max_workers=max(1, concurrency), thread_name_prefix="deref")
    inflight: dict[Future, Link] = {}
    try:
        while not stop.is_set():
            while len(inflight) < concurrency:
                link = queue.pop()
                if link is None:
                    break
                inflight[pool.submit(dereference, link.target, policy, transport)] = link
            if not inflight:
                break
            done, _ = wait(inflight, timeout=0.05, return_when=FIRST_COMPLETED)
            for future in done:
                link = inflight.pop(future)
                if stop.is_set():
                    break
                _handle(future.result(), link, extractors, source, queue, policy, context_factory, report)
    except BaseException as exc:
        error = exc
        raise
    finally:
        report.stopped = stop.is_set()
        for future in inflight:
            future.cancel()
        pool.shutdown(wait=False, cancel_futures=True)
        report.wire_requests = policy.wire_requests
        report.wall_time_ms = (time.perf_counter() - started) * 1000
        if close_source:
            source.close(error)
    return report


def _handle(result, link, extractors, source, queue, policy, context_factory, report) -> None:
    if not result.ok:
        if not policy.lenient:
            raise TraversalError(result)
        report.errors_ignored += 1
        report.errors.append(f"{result.requested_url.value}: {result.status}")
        log.debug("ignoring %s: %s", result.requested_url.value, result.status)
        return
    doc = result.document
    report.documents_fetched += 1
    report.fetched.append(doc.url.value)
    try:
        source.extend(doc.triples)
    except SourceClosed:
        return
    ctx = context_factory(link.target) if context_factory else None
    for extractor in extractors:
        for found in sorted(extractor.extract(doc, ctx), key=lambda l: l.target.value):
            queue.enqueue(found)
