"""Integrated traversal versus two-phase (crawl, then plan on exact cardinalities).

Reports first-result time, total time and intermediate join results per query.

    python3 scripts/two_phase.py --persons 10
"""
from __future__ import annotations

import argparse

from ltqp.bench.generator import SyntheticConfig, generate_environment
from ltqp.bench.server import serve
from ltqp.bench.workload import workload
from ltqp.execution import EngineConfig, evaluate_two_phase, run_query
from ltqp.traversal import HttpTransport


def fmt(ms):
    return "-" if ms is None else f"{ms:.1f}"


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--persons", type=int, default=10)
    p.add_argument("--discovery", default="ldp-idx-filt")
    args = p.parse_args()
    env = generate_environment(SyntheticConfig(random_seed=args.seed, persons=args.persons, noise_per_person=1))
    config = EngineConfig(discovery=args.discovery)
    print(f"{'query':<6}{'mode':<11}{'t1 ms':>8}{'t ms':>8}{'inter':>8}{'results':>9}")
    with serve(env) as srv:
        live = env.rebase(srv.base_url)
        for case in workload(live):
            for mode, runner in (("integrated", run_query), ("two-phase", evaluate_two_phase)):
                stream = runner(case.query, [case.person], config, HttpTransport())
                rows = stream.collect()
                s = stream.stats
                print(f"{case.name:<6}{mode:<11}{fmt(s.t_first_ms):>8}{s.elapsed_ms:>8.1f}"
                      f"{s.intermediate_results:>8}{len(rows):>9}")


if __name__ == "__main__":
    main()
