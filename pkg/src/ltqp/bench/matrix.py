"""Factorial experiment runner: queries x discovery modes x reachability."""
from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, TextIO

from ..execution import EngineConfig, run_query
from ..traversal import HttpTransport, Transport
from .generator import GeneratedEnvironment
from .oracle import accuracy_f1, oracle_evaluate
from .workload import QueryCase

CSV_COLUMNS = ("query", "discovery", "reachability", "strategy", "mult", "t_avg", "t_med",
               "t1_avg", "t1_med", "req", "results", "acc", "timeouts")

DEFAULT_REACHABILITIES = ("cnone", "cmatch", "call")
DEFAULT_DISCOVERIES = ("base", "idx", "idx-filt", "ldp", "ldp-idx", "ldp-idx-filt")


@dataclass
class Metrics:
    exec_time_ms: float
    time_first_result_ms: float | None
    wire_requests: int
    result_count: int
    accuracy_f1: float
    timed_out: bool
    arrivals_ms: list[float] = field(default_factory=list)
    error: str | None = None


@dataclass
class CellResult:
    query: str
    discovery: str
    reachability: str
    strategy: str
    mult: int
    runs: list[Metrics]

    def row(self) -> dict:
        times = [m.exec_time_ms for m in self.runs]
        firsts = [m.time_first_result_ms for m in self.runs if m.time_first_result_ms is not None]
        return {
            "query": self.query,
            "discovery": self.discovery,
            "reachability": self.reachability,
            "strategy": self.strategy,
            "mult": self.mult,
            "t_avg": round(statistics.fmean(times), 3),
            "t_med": round(statistics.median(times), 3),
            "t1_avg": round(statistics.fmean(firsts), 3) if firsts else "",
            "t1_med": round(statistics.median(firsts), 3) if firsts else "",
            "req": round(statistics.fmean(m.wire_requests for m in self.runs), 2),
            "results": round(statistics.fmean(m.result_count for m in self.runs), 2),
            "acc": round(statistics.fmean(m.accuracy_f1 for m in self.runs), 2),
            "timeouts": sum(m.timed_out for m in self.runs),
        }

    @property
    def accuracy(self) -> float:
        return statistics.fmean(m.accuracy_f1 for m in self.runs)

    @property
    def wire_requests(self) -> float:
        return statistics.fmean(m.wire_requests for m in self.runs)


def measure(case: QueryCase, expected: set, config: EngineConfig, transport: Transport) -> Metrics:
    """One engine run scored against ``expected``; failures become zero-accuracy rows."""
    try:
        stream = run_query(case.query, [case.person], config, transport)
        actual = set(stream.collect())
    except Exception as exc:  # a failing cell must not abort the matrix
        return Metrics(0.0, None, 0, 0, 0.0, True, error=f"{type(exc).__name__}: {exc}")
    s = stream.stats
    return Metrics(s.elapsed_ms, s.t_first_ms, stream.report.wire_requests if stream.report else 0,
                   s.count, accuracy_f1(expected, actual), s.timed_out, list(s.arrivals_ms))


def run_matrix(
    env: GeneratedEnvironment,
    cases: Sequence[QueryCase],
    reachabilities: Iterable[str] = DEFAULT_REACHABILITIES,
    discoveries: Iterable[str] = DEFAULT_DISCOVERIES,
    repetitions: int = 1,
    config: EngineConfig | None = None,
    transport: Transport | None = None,
) -> list[CellResult]:
    """Run every (query, discovery, reachability) cell sequentially.

    Each run starts with an empty document cache. ``env`` must describe the
    documents at the IRIs the engine will fetch (rebase it onto the server).
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    base = config or EngineConfig()
    transport = transport or HttpTransport()
    reachabilities, discoveries = list(reachabilities), list(discoveries)
    strategy = env.config.strategy.value
    mult = env.config.multiplication_factor
    cells = []
    for case in cases:
        expected = oracle_evaluate(case.query, env)
        for discovery in discoveries:
            for reachability in reachabilities:
                cfg = replace(base, reachability=reachability, discovery=discovery)
                runs = [measure(case, expected, cfg, transport) for _ in range(repetitions)]
                cells.append(CellResult(case.name, discovery, reachability, strategy, mult, runs))
    return cells


def write_csv(cells: Iterable[CellResult], out: TextIO | None = None) -> str:
    buffer = out or io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for cell in cells:
        writer.writerow(cell.row())
    return buffer.getvalue() if out is None else ""


def write_arrivals(cells: Iterable[CellResult], out: TextIO) -> None:
    """One JSON line per run with its per-result arrival times in ms."""
    for cell in cells:
        for i, run in enumerate(cell.runs):
            out.write(json.dumps({"query": cell.query, "discovery": cell.discovery,
                                  "reachability": cell.reachability, "run": i,
                                  "arrivals_ms": [round(a, 3) for a in run.arrivals_ms]}) + "\n")
