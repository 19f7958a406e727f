"""Command-line entry points: query, generate, serve, bench.

Exit codes: 0 success, 1 fatal error or invalid usage, 2 timeout with
partial results. Results and CSV go to stdout, everything else to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import threading
from pathlib import Path

from .execution import EngineConfig, run_query
from .extractors import DISCOVERY, REACHABILITY
from .lexer import ParseError
from .query import parse_query
from .rdf import Iri, is_absolute
from .traversal import HttpTransport, TraversalError

EXIT_OK, EXIT_FATAL, EXIT_TIMEOUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FATAL, f"{self.prog}: error: {message}\n")


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _env_int(name: str, default: int) -> int:
    try:
        return int(os.environ.get(name, default))
    except ValueError:
        return default


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ltqp", description="Link-traversal queries over Solid-style data vaults.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("query", help="execute a SPARQL query by link traversal")
    q.add_argument("--query", required=True, type=Path, help="SPARQL query file")
    q.add_argument("--seed", action="append", default=[], help="seed IRI (repeatable)")
    q.add_argument("--reachability", choices=list(REACHABILITY), default="cmatch")
    q.add_argument("--discovery", choices=list(DISCOVERY), default="ldp-idx-filt")
    q.add_argument("--timeout", type=_positive, default=_env_int("LTQP_TIMEOUT_MS", 120_000), help="query timeout in ms")
    q.add_argument("--lenient", type=_bool, default=True)
    q.add_argument("--concurrency", type=_positive, default=_env_int("LTQP_CONCURRENCY", 4))
    q.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    q.set_defaults(handler=cmd_query)

    g = sub.add_parser("generate", help="generate a synthetic vault environment")
    g.add_argument("--out", required=True, type=Path)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--persons", type=int, default=10)
    g.add_argument("--posts", type=int, default=2, help="posts per person")
    g.add_argument("--comments", type=int, default=1, help="comments per post")
    g.add_argument("--likes", type=int, default=1, help="likes per person")
    g.add_argument("--knows", type=int, default=2, help="knows edges per person")
    g.add_argument("--mult", type=_positive, default=1, help="post multiplication factor")
    g.add_argument("--noise", type=int, default=1, help="noise documents per person")
    g.add_argument("--strategy", default="composite",
                   choices=("separate", "single", "location", "time", "composite"))
    g.add_argument("--base-url", default="http://localhost:3000/")
    g.set_defaults(handler=cmd_generate)

    s = sub.add_parser("serve", help="serve a generated environment over HTTP")
    s.add_argument("--root", required=True, type=Path)
    s.add_argument("--port", type=int, default=3000)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--delay-ms", type=float, default=0.0, help="artificial delay per request")
    s.set_defaults(handler=cmd_serve)

    b = sub.add_parser("bench", help="run the experiment matrix over an environment")
    b.add_argument("--env", required=True, type=Path)
    b.add_argument("--matrix", choices=("default", "small"), default="default")
    b.add_argument("--repetitions", type=_positive, default=1)
    b.add_argument("--persons", type=int, nargs="*", default=[0], help="person indexes to instantiate queries for")
    b.add_argument("--timeout", type=_positive, default=_env_int("LTQP_TIMEOUT_MS", 120_000))
    b.add_argument("--concurrency", type=_positive, default=_env_int("LTQP_CONCURRENCY", 4))
    b.add_argument("--arrivals", type=Path, help="write per-result arrival times as JSON lines")
    b.set_defaults(handler=cmd_bench)
    return parser


def cmd_query(args) -> int:
    try:
        query = parse_query(args.query.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"ltqp: cannot read query: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except ParseError as exc:
        print(f"ltqp: invalid query: {exc}", file=sys.stderr)
        return EXIT_FATAL
    for seed in args.seed:
        if not is_absolute(seed):
            print(f"ltqp: seed must be an absolute IRI: {seed}", file=sys.stderr)
            return EXIT_FATAL
    config = EngineConfig(reachability=args.reachability, discovery=args.discovery, lenient=args.lenient,
                          timeout_ms=args.timeout, concurrency=args.concurrency)
    out = sys.stdout
    names = [v.name for v in query.projection]
    writer = None
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(names)
    try:
        stream = run_query(query, [Iri(s) for s in args.seed], config, HttpTransport())
        for mu in stream:
            row = mu.to_json()
            if writer is not None:
                writer.writerow([row.get(n, "") for n in names])
            else:
                out.write(json.dumps(row) + "\n")
            out.flush()
    except (ValueError, TraversalError) as exc:
        print(f"ltqp: {exc}", file=sys.stderr)
        return EXIT_FATAL
    print(json.dumps(stream.summary()), file=sys.stderr)
    return EXIT_TIMEOUT if stream.stats.timed_out else EXIT_OK


def cmd_generate(args) -> int:
    from .bench.generator import SyntheticConfig, generate_environment, write_environment

    try:
        cfg = SyntheticConfig(random_seed=args.seed, persons=args.persons, posts_per_person=args.posts,
                              comments_per_post=args.comments, likes_per_person=args.likes,
                              knows_per_person=args.knows, multiplication_factor=args.mult,
                              strategy=args.strategy, base_url=args.base_url, noise_per_person=args.noise)
    except ValueError as exc:
        print(f"ltqp: {exc}", file=sys.stderr)
        return EXIT_FATAL
    env = generate_environment(cfg)
    manifest = write_environment(env, args.out)
    print(f"wrote {len(env.documents)} documents for {len(env.persons)} persons; manifest {manifest}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .bench.generator import load_environment
    from .bench.server import serve

    try:
        env = load_environment(args.root)
        handle = serve(env, port=args.port, host=args.host, delay_ms=args.delay_ms)
    except (OSError, ValueError) as exc:
        print(f"ltqp: {exc}", file=sys.stderr)
        return EXIT_FATAL
    print(f"serving {len(env.documents)} documents at {handle.base_url}", file=sys.stderr)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        handle.close()
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench.generator import load_environment
    from .bench.matrix import DEFAULT_DISCOVERIES, DEFAULT_REACHABILITIES, run_matrix, write_arrivals, write_csv
    from .bench.server import serve
    from .bench.workload import workload

    try:
        env = load_environment(args.env)
    except (OSError, ValueError) as exc:
        print(f"ltqp: {exc}", file=sys.stderr)
        return EXIT_FATAL
    if args.matrix == "small":
        reach, disc = ("cnone", "cmatch"), ("base", "ldp-idx-filt")
    else:
        reach, disc = DEFAULT_REACHABILITIES, DEFAULT_DISCOVERIES
    config = EngineConfig(timeout_ms=args.timeout, concurrency=args.concurrency)
    with serve(env) as handle:
        live = env.rebase(handle.base_url)
        cases = workload(live, persons=args.persons)
        cells = run_matrix(live, cases, reach, disc, args.repetitions, config)
    sys.stdout.write(write_csv(cells))
    if args.arrivals:
        with open(args.arrivals, "w", encoding="utf-8") as fh:
            write_arrivals(cells, fh)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
