"""Hierarchy depth and level sizes as the cutoff varies.

Reads a tab-separated edge list (citing, cited), or generates a synthetic
citation graph when no file is given, and prints one row per cutoff.

    python3 scripts/cutoff_sweep.py edges.tsv --cutoffs 2 4 8 12 20
"""

from __future__ import annotations

import argparse
from pathlib import Path

from eqrank.evaluation import community_report, generate_test_graph
from eqrank.graph import WeightConfig, compute_weights, load_graph, weakly_connected_components
from eqrank.themes import CutoffConfig, CutoffError, build_theme_hierarchy


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("edges", nargs="?", help="edge list; synthetic graph if omitted")
    ap.add_argument("--cutoffs", type=int, nargs="+", default=[2, 4, 8, 12, 16, 20, 30])
    ap.add_argument("--a", type=float, default=0.9, help="co-citation share of the weight")
    ap.add_argument("--n", type=int, default=5000, help="synthetic graph size")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.edges:
        g = load_graph(Path(args.edges).read_text(encoding="utf-8"))
    else:
        g = generate_test_graph("citation_like", seed=args.seed, n=args.n, out_degree=8)
    g = compute_weights(g, WeightConfig(args.a))
    comps = weakly_connected_components(g).blocks
    sub = g.subgraph(max(comps, key=len))
    print(f"# {g.n} vertices, {g.n_edges} links, largest component {sub.n}")
    print("f_cut\tn_levels\tlevel_sizes\tci_level1\torphans")
    for f in args.cutoffs:
        try:
            th = build_theme_hierarchy(sub, CutoffConfig(f))
        except CutoffError:
            print(f"{f}\t\t\t\t")
            continue
        ci = community_report(sub, [t.members for t in th.themes[0]]).weighted_mean
        sizes = ",".join(map(str, th.level_sizes))
        print(f"{f}\t{th.n_levels}\t{sizes}\t{ci:.3f}\t{len(th.orphans)}")


if __name__ == "__main__":
    main()
