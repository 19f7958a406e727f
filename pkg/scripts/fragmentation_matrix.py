"""Effect of fragmentation strategy and post multiplication on cmatch + ldp-idx-filt.

    python3 scripts/fragmentation_matrix.py --persons 10 --mults 1 5 --out results/
"""
from __future__ import annotations

import argparse
import statistics
from pathlib import Path

from ltqp.bench.generator import Strategy, SyntheticConfig, generate_environment
from ltqp.bench.matrix import run_matrix, write_csv
from ltqp.bench.server import serve
from ltqp.bench.workload import workload


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--persons", type=int, default=10)
    p.add_argument("--mults", type=int, nargs="+", default=[1, 5])
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--out", type=Path, default=Path("results"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    cells = []
    print(f"{'strategy':<11}{'mult':>5}{'docs':>7}{'t_avg ms':>10}{'req':>8}{'results':>9}{'acc %':>8}")
    for mult in args.mults:
        for strategy in Strategy:
            env = generate_environment(SyntheticConfig(random_seed=args.seed, persons=args.persons,
                                                       multiplication_factor=mult, strategy=strategy,
                                                       noise_per_person=1))
            with serve(env) as srv:
                live = env.rebase(srv.base_url)
                rows = run_matrix(live, workload(live), ["cmatch"], ["ldp-idx-filt"], args.repetitions)
            cells += rows
            table = [r.row() for r in rows]
            print(f"{strategy.value:<11}{mult:>5}{len(env.documents):>7}"
                  f"{statistics.fmean(r['t_avg'] for r in table):>10.1f}"
                  f"{statistics.fmean(r['req'] for r in table):>8.1f}"
                  f"{sum(r['results'] for r in table):>9.0f}"
                  f"{statistics.fmean(r['acc'] for r in table):>8.1f}")
    (args.out / "fragmentation_matrix.csv").write_text(write_csv(cells))


if __name__ == "__main__":
    main()
