"""Command-line front end.

    eqrank cluster  --edges cites.tsv --out run/
    eqrank themes   --out run/ --metadata meta.tsv
    eqrank evaluate --out run/ --metadata meta.tsv --external gasperini=list.txt
    eqrank sweep    --edges cites.tsv --cutoffs 4,8,12,20
    eqrank gen      --model citation_like --n 1000 --seed 1 > cites.tsv

Every option may also come from a JSON config file (``--config``); flags win.
Exit status: 0 ok, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import core, evaluation, io, themes
from .graph import (
    IngestError,
    IngestReport,
    WeightConfig,
    compute_weights,
    degree_stats,
    dumps_graph,
    load_graph,
    load_metadata,
    loads_graph,
    weakly_connected_components,
)

log = logging.getLogger("eqrank")


class InvariantError(RuntimeError):
    pass


@dataclass
class RunConfig:
    edges: str | None = None
    metadata: str | None = None
    stop_list: str | None = None
    external_lists: dict[str, str] = field(default_factory=dict)
    a: float = 0.9
    f_cut: int = 20
    eps: float = 0.05
    burst_factor: float = 2.0
    window: list[int] | None = None
    out: str = "eqrank_out"
    largest_only: bool = False
    seed: int = 0

    def validate(self, need_edges: bool = False) -> None:
        WeightConfig(self.a)
        themes.CutoffConfig(self.f_cut)
        if need_edges and not self.edges:
            raise IngestError("no edge list given (--edges)")
        for p in [self.edges, self.metadata, self.stop_list, *self.external_lists.values()]:
            if p and not os.path.exists(p):
                raise IngestError(f"{p}: no such file")
        if self.window is not None and (len(self.window) != 2 or self.window[0] > self.window[1]):
            raise IngestError(f"bad year window {self.window}")


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write(path: Path, text: str) -> None:
    path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _manifest(cfg: RunConfig, outdir: Path, command: str, outputs: list[str]) -> None:
    cfg_json = json.dumps(dataclasses.asdict(cfg), sort_keys=True)
    inputs = {}
    for p in [cfg.edges, cfg.metadata, cfg.stop_list, *cfg.external_lists.values()]:
        if p:
            inputs[p] = _sha256(p)
    path = outdir / "manifest.json"
    doc = json.loads(path.read_text()) if path.exists() else {"format_version": 1, "runs": {}}
    doc["runs"][command] = {
        "config": json.loads(cfg_json),
        "config_sha256": hashlib.sha256(cfg_json.encode()).hexdigest(),
        "inputs": inputs,
        "outputs": {o: _sha256(outdir / o) for o in sorted(outputs)},
    }
    _write(path, json.dumps(doc, indent=1, sort_keys=True))


def _read_edges(cfg: RunConfig):
    report = IngestReport()
    with open(cfg.edges, encoding="utf-8") as fh:
        try:
            g = load_graph(fh, report=report)
        except IngestError as exc:
            raise IngestError(f"{cfg.edges}: {exc}") from None
    if g.n_edges == 0:
        raise IngestError(f"{cfg.edges}: no edges")
    return g, report


def _read_meta(cfg: RunConfig, g):
    if not cfg.metadata:
        return {}
    report = IngestReport()
    with open(cfg.metadata, encoding="utf-8") as fh:
        try:
            meta = load_metadata(fh, g, report=report)
        except IngestError as exc:
            raise IngestError(f"{cfg.metadata}: {exc}") from None
    for w in report.warnings[:20]:
        log.warning("%s: %s", cfg.metadata, w)
    return meta


def _stop_words(cfg: RunConfig):
    if not cfg.stop_list:
        log.info("no stop list given; using the built-in default")
        return themes.DEFAULT_STOP_WORDS
    words = Path(cfg.stop_list).read_text(encoding="utf-8").split()
    return frozenset(w.lower() for w in words)


def _components(g, largest_only: bool):
    comps = weakly_connected_components(g).blocks
    order = sorted(range(len(comps)), key=lambda i: (-len(comps[i]), i))
    if largest_only:
        order = order[:1]
    return [comps[i] for i in order]


def cluster_graph(g, cfg: RunConfig):
    """Cluster every weak component; returns hierarchy records and results."""
    cut = themes.CutoffConfig(cfg.f_cut)
    records, results = [], []
    for ci, verts in enumerate(_components(g, cfg.largest_only)):
        sub = g.subgraph(verts)
        if sub.n < cut.f_cut:
            records.append(io.hierarchy_record(ci, verts, "below_cutoff"))
            results.append(None)
            continue
        try:
            th = themes.build_theme_hierarchy(sub, cut)
        except themes.CutoffError:
            records.append(io.hierarchy_record(ci, verts, "below_cutoff"))
            results.append(None)
            continue
        _check_hierarchy(th.hierarchy)
        records.append(io.hierarchy_record(ci, verts, "clustered", th))
        results.append((sub, th))
    return records, results


def _check_hierarchy(h: core.Hierarchy) -> None:
    sizes = h.sizes
    if any(b >= a for a, b in zip(sizes, sizes[1:])):
        raise InvariantError(f"level sizes not strictly decreasing: {sizes}")
    for p, g in zip(h.projections, h.graphs):
        if p.n != g.n:
            raise InvariantError("projection does not cover its level")


def cmd_cluster(cfg: RunConfig, dry_run: bool = False) -> int:
    cfg.validate(need_edges=True)
    g, report = _read_edges(cfg)
    log.info(
        "graph: %d vertices, %d links (%d duplicates, %d self-loops dropped)",
        g.n, g.n_edges, report.duplicates, report.self_loops,
    )
    if dry_run:
        return 0
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    g = compute_weights(g, WeightConfig(cfg.a))
    records, results = cluster_graph(g, cfg)

    lines = [f"vertices\t{g.n}", f"links\t{g.n_edges}", f"components\t{len(records)}"]
    summary = {"vertices": g.n, "links": g.n_edges, "a": cfg.a, "f_cut": cfg.f_cut, "components": []}
    for rec in records:
        entry = {"component": rec["component"], "size": len(rec["vertices"]), "status": rec["status"]}
        if rec["status"] == "clustered":
            entry["level_sizes"] = rec["level_sizes"]
            entry["n_levels"] = rec["n_levels"]
            lines.append(
                f"component {rec['component']}\tsize {entry['size']}\tlevels {entry['n_levels']}\t"
                f"level_sizes {' '.join(map(str, rec['level_sizes']))}"
            )
        summary["components"].append(entry)
    main = next((r for r in results if r is not None), None)
    if main is not None:
        sub = main[0]
        for name, h in (("max", core.max_links(sub)), ("max_inverted", core.max_links(core.invert(sub)))):
            st = degree_stats(h)
            summary[f"unit_out_degree_{name}"] = st.out_degree_one
            lines.append(f"unit out-degree fraction in {name} graph\t{st.out_degree_one:.4f}")
    n_below = sum(r["status"] == "below_cutoff" for r in records)
    lines.append(f"components below cutoff\t{n_below}")
    for ln in lines:
        log.info(ln)

    _write(outdir / "graph.json", dumps_graph(g))
    _write(outdir / "hierarchy.json", io.dumps_hierarchy(records, cfg.f_cut))
    _write(outdir / "summary.json", json.dumps(summary, indent=1, sort_keys=True))
    _write(outdir / "summary.txt", "\n".join(lines))
    _manifest(cfg, outdir, "cluster", ["graph.json", "hierarchy.json", "summary.json", "summary.txt"])
    return 0


def _load_run(cfg: RunConfig):
    outdir = Path(cfg.out)
    gpath, hpath = outdir / "graph.json", outdir / "hierarchy.json"
    if not gpath.exists() or not hpath.exists():
        raise IngestError(f"{outdir}: run 'eqrank cluster' first")
    g = loads_graph(gpath.read_text(encoding="utf-8"))
    doc = io.loads_hierarchy(hpath.read_text(encoding="utf-8"))
    runs = []
    for rec in doc["components"]:
        if rec["status"] != "clustered":
            continue
        sub = g.subgraph(rec["vertices"])
        h = themes.rebuild_hierarchy(sub, rec["projections"])
        if h.sizes != rec["level_sizes"]:
            raise InvariantError("stored level sizes do not match the rebuilt hierarchy")
        runs.append((rec, sub, h))
    return g, runs


def _labelled_themes(rec, sub, h, meta, stop):
    levels = themes.collect_themes(h)
    orphans = set(rec.get("orphans", []))
    out = []
    for lvl in levels:
        if meta:
            labels = themes.label_themes([t.members for t in lvl], _local_meta(rec, meta), stop)
        else:
            labels = [()] * len(lvl)
        out.append(
            [
                dataclasses.replace(t, label=lab, orphan=(t.level == 1 and t.block in orphans))
                for t, lab in zip(lvl, labels)
            ]
        )
    return out


def _local_meta(rec, meta):
    return {i: meta[v] for i, v in enumerate(rec["vertices"]) if v in meta}


def cmd_themes(cfg: RunConfig, dry_run: bool = False) -> int:
    cfg.validate()
    g, runs = _load_run(cfg)
    meta = _read_meta(cfg, g)
    if not meta:
        log.warning("no metadata: labels and author rankings skipped")
    stop = _stop_words(cfg)
    if dry_run:
        return 0
    outdir = Path(cfg.out)
    records, text = [], []
    for rec, sub, h in runs:
        lmeta = _local_meta(rec, meta)
        maxg = themes.max_graph_pair(sub)
        for lvl in _labelled_themes(rec, sub, h, meta, stop):
            for t in lvl:
                auth, hub = themes.rank_papers(t, sub, top=None, max_graphs=maxg)
                top_auth, top_hub = auth[: themes.TOP_N], hub[: themes.TOP_N]
                a_auth, a_hub = themes.rank_authors(auth, lmeta) if lmeta else ([], [])
                ext = sub.external_id
                roots_fmt = (lambda vs: [ext(v) for v in vs]) if t.level == 1 else (
                    lambda vs: [f"L{t.level - 1}:{v}" for v in vs]
                )
                r = {
                    "component": rec["component"],
                    "level": t.level,
                    "theme": t.block,
                    "size": t.size,
                    "orphan": t.orphan,
                    "label": list(t.label),
                    "root_hubs": roots_fmt(t.root_hubs),
                    "root_authorities": roots_fmt(t.root_authorities),
                    "top_papers_by_authority": [[ext(e.subject), e.authority_number, e.hub_number] for e in top_auth],
                    "top_papers_by_hub": [[ext(e.subject), e.authority_number, e.hub_number] for e in top_hub],
                    "top_authors_by_authority": [[e.subject, e.authority_number, e.hub_number] for e in a_auth],
                    "top_authors_by_hub": [[e.subject, e.authority_number, e.hub_number] for e in a_hub],
                }
                records.append(json.dumps(r, sort_keys=True))
                text.append(
                    f"[component {r['component']} level {t.level} theme {t.block}] size {t.size}"
                    + (" (orphan)" if t.orphan else "")
                )
                if t.label:
                    text.append("  label: " + "; ".join(t.label))
                text.append("  top authorities: " + ", ".join(x[0] for x in r["top_papers_by_authority"]))
                text.append("  top hubs: " + ", ".join(x[0] for x in r["top_papers_by_hub"]))
                if a_auth:
                    text.append("  main authors: " + ", ".join(e.subject for e in a_auth))
    _write(outdir / "themes.jsonl", "\n".join(records))
    _write(outdir / "themes.txt", "\n".join(text))
    _manifest(cfg, outdir, "themes", ["themes.jsonl", "themes.txt"])
    return 0


def _read_external(path: str, g) -> tuple[set[int], int]:
    lookup = {k: i for i, k in enumerate(g.ids)} if g.ids is not None else {str(i): i for i in range(g.n)}
    ids, missing = set(), 0
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line in lookup:
            ids.add(lookup[line])
        else:
            missing += 1
    return ids, missing


def cmd_evaluate(cfg: RunConfig, dry_run: bool = False) -> int:
    cfg.validate()
    g, runs = _load_run(cfg)
    meta = _read_meta(cfg, g)
    stop = _stop_words(cfg)
    externals = {}
    for name, path in sorted(cfg.external_lists.items()):
        ids, missing = _read_external(path, g)
        if missing:
            log.warning("%s: %d ids not in the graph, excluded", path, missing)
        externals[name] = ids
    if dry_run:
        return 0
    outdir = Path(cfg.out)
    trend_cfg = evaluation.TrendConfig(eps=cfg.eps, burst_factor=cfg.burst_factor)
    window = tuple(cfg.window) if cfg.window else None
    comm_rows, dyn_rows, series_rows, overlap_rows, means = [], [], [], [], []
    for rec, sub, h in runs:
        lmeta = _local_meta(rec, meta)
        for lvl in _labelled_themes(rec, sub, h, meta, stop):
            if not lvl:
                continue
            level = lvl[0].level
            ranked = sorted(lvl, key=lambda t: (-t.size, t.block))
            rep = evaluation.community_report(sub, [t.members for t in ranked])
            means.append((rec["component"], level, rep.weighted_mean, sum(rep.ideal), len(ranked)))
            for num, (t, idx) in enumerate(zip(ranked, rep.indices), start=1):
                label = "; ".join(t.label[:2])
                comm_rows.append((rec["component"], level, num, t.block, t.size, label, idx, int(idx > 0.5)))
                if lmeta:
                    tr = evaluation.theme_dynamics(t.members, lmeta, window, trend_cfg)
                    dyn_rows.append(
                        (rec["component"], level, num, t.block, t.size, label, tr.trend or "", tr.slope)
                    )
                    for y, c in zip(tr.years, tr.counts):
                        series_rows.append((rec["component"], level, t.block, y, c))
            for name, ids in externals.items():
                local = {i for i, v in enumerate(rec["vertices"]) if v in ids}
                if not local:
                    continue
                best = max(ranked, key=lambda t: (evaluation.reference_overlap(t.members, local), -t.block))
                overlap_rows.append(
                    (name, rec["component"], level, best.block, best.size,
                     evaluation.reference_overlap(best.members, local), len(local))
                )
    outs = ["community.tsv", "community_means.tsv"]
    io.write_tsv(
        outdir / "community.tsv",
        ["component", "level", "theme_number", "block", "size", "label", "community_index", "ideal"],
        comm_rows,
    )
    io.write_tsv(
        outdir / "community_means.tsv",
        ["component", "level", "weighted_mean", "ideal_themes", "themes"],
        means,
    )
    if meta:
        io.write_tsv(
            outdir / "dynamics.tsv",
            ["component", "level", "theme_number", "block", "size", "label", "trend", "slope"],
            dyn_rows,
        )
        io.write_tsv(outdir / "yearly_counts.tsv", ["component", "level", "block", "year", "count"], series_rows)
        outs += ["dynamics.tsv", "yearly_counts.tsv"]
    if externals:
        io.write_tsv(
            outdir / "overlap.tsv",
            ["list", "component", "level", "block", "size", "overlap", "resolved_ids"],
            overlap_rows,
        )
        outs.append("overlap.tsv")
    for comp, level, mean, ideal, k in means:
        log.info("component %d level %d: weighted community index %.3f, %d/%d ideal", comp, level, mean, ideal, k)
    _manifest(cfg, outdir, "evaluate", outs)
    return 0


def sweep_rows(g, cutoffs, largest_only=True):
    """``(f_cut, n_levels, level_sizes)`` for the largest weak component."""
    comp = _components(g, True)[0] if largest_only else list(range(g.n))
    sub = g.subgraph(comp)
    rows = []
    for f in cutoffs:
        try:
            th = themes.build_theme_hierarchy(sub, themes.CutoffConfig(f))
        except themes.CutoffError:
            rows.append((f, None, []))
            continue
        rows.append((f, th.n_levels, th.hierarchy.sizes[1:]))
    return rows


def cmd_sweep(cfg: RunConfig, cutoffs: list[int], dry_run: bool = False) -> int:
    cfg.validate(need_edges=True)
    if not cutoffs or min(cutoffs) < 1:
        raise IngestError("cutoffs must be a nonempty list of integers >= 1")
    g, _ = _read_edges(cfg)
    if dry_run:
        return 0
    g = compute_weights(g, WeightConfig(cfg.a))
    rows = sweep_rows(g, cutoffs)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    table = [(f, "" if n is None else n, " ".join(map(str, sizes))) for f, n, sizes in rows]
    io.write_tsv(outdir / "sweep.tsv", ["f_cut", "n_levels", "level_sizes"], table)
    for f, n, s in table:
        print(f"{f}\t{n}\t{s}")
    _manifest(cfg, outdir, "sweep", ["sweep.tsv"])
    return 0


def cmd_gen(model: str, seed: int, params: dict, output: str | None) -> int:
    g = evaluation.generate_test_graph(model, seed=seed, **params)
    lines = [f"# {model} seed={seed} " + " ".join(f"{k}={v}" for k, v in sorted(params.items()))]
    lines += [f"{s}\t{d}" for s, d in g.edges()]
    text = "\n".join(lines) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqrank", description="EqRank hierarchical clustering of citation graphs")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, edges=False):
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--out", help="output directory")
        p.add_argument("--dry-run", action="store_true", help="validate inputs only")
        if edges:
            p.add_argument("--edges", help="edge list, src<TAB>dst per line")
            p.add_argument("--a", type=float, help="co-citation share of the link weight (default 0.9)")
            p.add_argument("--f-cut", type=int, dest="f_cut", help="minimal level-1 theme size (default 20)")

    p = sub.add_parser("cluster", help="weights, components and the theme hierarchy")
    common(p, edges=True)
    p.add_argument("--largest-only", action="store_true", default=None, dest="largest_only",
                   help="cluster only the largest weakly connected component")

    p = sub.add_parser("themes", help="labels and authority/hub rankings")
    common(p)
    p.add_argument("--metadata", help="id<TAB>date<TAB>title<TAB>author;author per line")
    p.add_argument("--stop-list", dest="stop_list", help="one stop word per line")

    p = sub.add_parser("evaluate", help="community index, dynamics, overlap")
    common(p)
    p.add_argument("--metadata", help="id<TAB>date<TAB>title<TAB>author;author per line")
    p.add_argument("--stop-list", dest="stop_list", help="one stop word per line")
    p.add_argument("--external", action="append", default=[], metavar="NAME=PATH",
                   help="reference theme, one paper id per line (repeatable)")
    p.add_argument("--window", type=int, nargs=2, metavar=("FIRST", "LAST"), help="years used for trends")
    p.add_argument("--eps", type=float, help="relative slope threshold (default 0.05)")
    p.add_argument("--burst-factor", type=float, dest="burst_factor", help="last-year burst ratio (default 2)")

    p = sub.add_parser("sweep", help="hierarchy depth as a function of the cutoff")
    common(p, edges=True)
    p.add_argument("--cutoffs", required=True, help="comma-separated list, e.g. 4,8,12,20")

    p = sub.add_parser("gen", help="write a synthetic test graph")
    p.add_argument("--model", choices=["poisson", "layered_dag", "citation_like"], default="citation_like")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--out-degree", type=int, dest="out_degree")
    p.add_argument("--layers", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--output", "-o", help="edge list path (stdout if omitted)")
    return ap


def _config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise IngestError(f"{args.config}: {exc}") from None
        names = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(doc) - names
        if unknown:
            raise IngestError(f"{args.config}: unknown fields {sorted(unknown)}")
        cfg = dataclasses.replace(cfg, **doc)
    for f in dataclasses.fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None and f.name != "external_lists":
            setattr(cfg, f.name, val)
    for item in getattr(args, "external", []) or []:
        name, sep, path = item.partition("=")
        if not sep:
            raise IngestError(f"--external expects NAME=PATH, got {item!r}")
        cfg.external_lists[name] = path
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "gen":
            params = {k: getattr(args, k) for k in ("n", "p", "out_degree", "layers", "width")}
            params = {k: v for k, v in params.items() if v is not None}
            return cmd_gen(args.model, args.seed, params, args.output)
        cfg = _config(args)
        if args.command == "cluster":
            return cmd_cluster(cfg, args.dry_run)
        if args.command == "themes":
            return cmd_themes(cfg, args.dry_run)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.dry_run)
        if args.command == "sweep":
            try:
                cutoffs = [int(x) for x in args.cutoffs.split(",") if x.strip()]
            except ValueError:
                raise IngestError(f"bad cutoff list {args.cutoffs!r}") from None
            return cmd_sweep(cfg, cutoffs, args.dry_run)
    except (InvariantError, AssertionError) as exc:
        print(f"eqrank: internal invariant violated: {exc}", file=sys.stderr)
        return 2
    except (IngestError, ValueError, OSError) as exc:
        print(f"eqrank: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
