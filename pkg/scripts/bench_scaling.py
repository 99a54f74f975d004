"""Time the clustering pipeline on synthetic citation graphs of growing size.

    python3 scripts/bench_scaling.py --sizes 1000 3000 10000 --out-degree 12
"""

from __future__ import annotations

import argparse
import math
import time

from eqrank.evaluation import community_report, generate_test_graph
from eqrank.graph import WeightConfig, compute_weights, weakly_connected_components
from eqrank.themes import CutoffConfig, build_theme_hierarchy, max_graph_pair, rank_papers


def run_once(n: int, out_degree: int, f_cut: int, seed: int) -> dict[str, float]:
    g = generate_test_graph("citation_like", seed=seed, n=n, out_degree=out_degree)
    times = {}
    t = time.perf_counter()
    g = compute_weights(g, WeightConfig(0.9))
    times["weights"] = time.perf_counter() - t

    t = time.perf_counter()
    comps = weakly_connected_components(g).blocks
    sub = g.subgraph(max(comps, key=len))
    th = build_theme_hierarchy(sub, CutoffConfig(f_cut))
    times["hierarchy"] = time.perf_counter() - t

    t = time.perf_counter()
    maxg = max_graph_pair(sub)
    for level in th.themes:
        community_report(sub, [x.members for x in level])
        for theme in level:
            rank_papers(theme, sub, max_graphs=maxg)
    times["evaluate"] = time.perf_counter() - t
    times["total"] = sum(times.values())
    times["levels"] = th.n_levels
    return times


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 3000, 10000])
    ap.add_argument("--out-degree", type=int, default=12)
    ap.add_argument("--f-cut", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print("n\tweights\thierarchy\tevaluate\ttotal\tlevels")
    prev = None
    for n in args.sizes:
        r = run_once(n, args.out_degree, args.f_cut, args.seed)
        print(f"{n}\t{r['weights']:.3f}\t{r['hierarchy']:.3f}\t{r['evaluate']:.3f}\t{r['total']:.3f}\t{r['levels']}")
        if prev:
            exponent = math.log(r["total"] / prev[1]) / math.log(n / prev[0])
            print(f"# scaling exponent {prev[0]} -> {n}: {exponent:.2f}")
        prev = (n, r["total"])


if __name__ == "__main__":
    main()
