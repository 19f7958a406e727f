"""Reachability x discovery matrix over generated environments, aggregated per cell.

Writes the raw per-query CSV and prints mean time, requests and accuracy per
(discovery, reachability) pair, averaged over all queries and environments.

    python3 scripts/discovery_matrix.py --envs 5 --persons 10 --out results/
"""
from __future__ import annotations

import argparse
import csv
import statistics
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from ltqp.bench.generator import SyntheticConfig, generate_environment
from ltqp.bench.matrix import DEFAULT_DISCOVERIES, DEFAULT_REACHABILITIES, run_matrix, write_arrivals, write_csv
from ltqp.bench.server import serve
from ltqp.bench.workload import workload
from ltqp.execution import EngineConfig


@dataclass(frozen=True)
class Experiment:
    envs: int = 5
    persons: int = 10
    posts: int = 2
    noise: int = 1
    strategy: str = "composite"
    repetitions: int = 1
    timeout_ms: int = 120_000
    delay_ms: float = 0.0
    out: Path = Path("results")


def parse_args() -> Experiment:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--envs", type=int, default=Experiment.envs)
    p.add_argument("--persons", type=int, default=Experiment.persons)
    p.add_argument("--posts", type=int, default=Experiment.posts)
    p.add_argument("--noise", type=int, default=Experiment.noise)
    p.add_argument("--strategy", default=Experiment.strategy)
    p.add_argument("--repetitions", type=int, default=Experiment.repetitions)
    p.add_argument("--timeout-ms", type=int, default=Experiment.timeout_ms)
    p.add_argument("--delay-ms", type=float, default=Experiment.delay_ms)
    p.add_argument("--out", type=Path, default=Experiment.out)
    return Experiment(**vars(p.parse_args()))


def main() -> None:
    exp = parse_args()
    exp.out.mkdir(parents=True, exist_ok=True)
    cells = []
    for seed in range(exp.envs):
        env = generate_environment(SyntheticConfig(random_seed=seed, persons=exp.persons, posts_per_person=exp.posts,
                                                   noise_per_person=exp.noise, strategy=exp.strategy))
        with serve(env, delay_ms=exp.delay_ms) as srv:
            live = env.rebase(srv.base_url)
            cases = workload(live, persons=(seed % exp.persons,))
            cells += run_matrix(live, cases, DEFAULT_REACHABILITIES, DEFAULT_DISCOVERIES, exp.repetitions,
                                EngineConfig(timeout_ms=exp.timeout_ms))
    (exp.out / "discovery_matrix.csv").write_text(write_csv(cells))
    with open(exp.out / "discovery_arrivals.jsonl", "w") as fh:
        write_arrivals(cells, fh)

    grouped = defaultdict(list)
    for cell in cells:
        grouped[cell.discovery, cell.reachability].append(cell.row())
    writer = csv.writer(open(exp.out / "discovery_summary.csv", "w", newline=""))
    writer.writerow(["discovery", "reachability", "t_avg", "req", "acc", "timeouts"])
    print(f"{'discovery':<14}{'reach':<8}{'t_avg ms':>10}{'req':>8}{'acc %':>8}{'timeouts':>10}")
    for (discovery, reach), rows in sorted(grouped.items()):
        t = statistics.fmean(r["t_avg"] for r in rows)
        req = statistics.fmean(r["req"] for r in rows)
        acc = statistics.fmean(r["acc"] for r in rows)
        timeouts = sum(r["timeouts"] for r in rows)
        writer.writerow([discovery, reach, round(t, 2), round(req, 2), round(acc, 2), timeouts])
        print(f"{discovery:<14}{reach:<8}{t:>10.1f}{req:>8.1f}{acc:>8.1f}{timeouts:>10}")


if __name__ == "__main__":
    main()
