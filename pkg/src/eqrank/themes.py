"""Themes: cutoff absorption, the two-stage hierarchy, labels and rankings."""

from __future__ import annotations

import logging
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    Hierarchy,
    Partition,
    eqrank_hierarchy,
    eqrank_relation,
    factor,
    invert,
    max_links,
    root_authorities,
    root_hubs,
)
from .graph import DocumentMeta, WeightedDigraph

log = logging.getLogger(__name__)

LABEL_PAIRS = 7
TOP_N = 10

DEFAULT_STOP_WORDS = frozenset(
    """
    a an and are as at be between beyond by can do does for from has have how
    in into is it its near new non not of on onto or over some than that the
    their there these this through to toward towards under upon using via
    what when where which while why with within without
    i ii iii iv v
    """.split()
)


class CutoffError(ValueError):
    pass


@dataclass(frozen=True)
class CutoffConfig:
    f_cut: int = 20

    def __post_init__(self):
        if self.f_cut < 1:
            raise ValueError(f"f_cut must be >= 1, got {self.f_cut}")


@dataclass(frozen=True)
class Theme:
    level: int
    block: int
    members: tuple[int, ...]
    root_hubs: tuple[int, ...] = ()
    root_authorities: tuple[int, ...] = ()
    label: tuple[str, ...] = ()
    orphan: bool = False

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class RankEntry:
    subject: int | str
    authority_number: float
    hub_number: float


@dataclass
class Absorption:
    partition: Partition
    orphans: list[int]
    # new block id -> id of the actual block (in the input partition) it grew from
    cores: dict[int, int]


def absorb_small_themes(g: WeightedDigraph, p: Partition, cfg: CutoffConfig) -> Absorption:
    """Glue every block smaller than ``f_cut`` onto its closest actual block.

    Closeness is the total weight of links between two blocks in either
    direction. Small blocks are compared only against the original actual
    blocks (one pass). Ties go to the smaller block id; a small block with no
    weight towards any actual block stays on its own as an orphan.
    """
    if p.n != g.n:
        raise ValueError("partition does not match graph")
    sizes = p.sizes
    actual = sizes >= cfg.f_cut
    if not actual.any():
        raise CutoffError(
            f"no block has >= {cfg.f_cut} members (largest is {int(sizes.max(initial=0))}); "
            "lower the cutoff"
        )
    bs, bd = p.labels[g.src], p.labels[g.dst]
    closeness: dict[int, dict[int, float]] = defaultdict(lambda: defaultdict(float))
    for a, b, w in zip(bs.tolist(), bd.tolist(), g.weight.tolist()):
        if actual[a] != actual[b]:
            small, big = (b, a) if actual[a] else (a, b)
            closeness[small][big] += w
    target = np.arange(p.n_blocks)
    orphans = []
    for s in np.flatnonzero(~actual).tolist():
        cand = closeness.get(s)
        best, best_w = -1, 0.0
        if cand:
            for big in sorted(cand):
                if cand[big] > best_w:
                    best, best_w = big, cand[big]
        if best < 0:
            orphans.append(s)
        else:
            target[s] = best
    merged = Partition.from_labels(target[p.labels])
    _, first_member = np.unique(p.labels, return_index=True)
    remap = {int(target[b]): int(merged.labels[first_member[b]]) for b in range(p.n_blocks)}
    cores = {remap[b]: b for b in np.flatnonzero(actual).tolist()}
    orphan_ids = sorted(remap[b] for b in orphans)
    if orphan_ids:
        log.warning("%d small blocks have no link to any actual theme", len(orphan_ids))
    return Absorption(merged, orphan_ids, cores)


@dataclass
class ThemeHierarchy:
    hierarchy: Hierarchy
    themes: list[list[Theme]]  # themes[i] are the blocks of G_{i+1}
    orphans: list[int] = field(default_factory=list)

    @property
    def level_sizes(self) -> list[int]:
        return self.hierarchy.sizes[1:]

    @property
    def n_levels(self) -> int:
        return hierarchy_depth(self.hierarchy)


def hierarchy_depth(h: Hierarchy) -> int:
    """Number of hierarchy levels: the graphs between ``G_0`` and the terminal one.

    A run that collapses straight to its terminal graph at level 1 still
    counts as one level.
    """
    k = len(h.graphs)
    return k - 2 if k >= 3 else k - 1


def build_theme_hierarchy(g: WeightedDigraph, cfg: CutoffConfig = CutoffConfig()) -> ThemeHierarchy:
    """EqRank + cutoff absorption for level 1, plain EqRank above it."""
    absorbed: list[Absorption] = []

    def cutoff(level: int, graph: WeightedDigraph, p: Partition) -> Partition:
        if level != 0:
            return p
        ab = absorb_small_themes(graph, p, cfg)
        absorbed.append(ab)
        return ab.partition

    h = eqrank_hierarchy(g, hook=cutoff)
    ab = absorbed[0] if absorbed else None
    themes = collect_themes(h, cores=ab.cores if ab else None)
    orphans = ab.orphans if ab and len(h.graphs) > 1 else []
    if orphans:
        themes[0] = [replace(t, orphan=t.block in orphans) for t in themes[0]]
    return ThemeHierarchy(h, themes, orphans)


def collect_themes(h: Hierarchy, cores: Mapping[int, int] | None = None) -> list[list[Theme]]:
    """Themes for every level above ``G_0``.

    Root hubs/authorities of a level-``i`` theme are vertices of ``G_{i-1}``:
    those of its core EqRank block (the actual block it grew from at level 1,
    otherwise its largest EqRank block).
    """
    out = []
    for level in range(1, len(h.graphs)):
        parent = h.graphs[level - 1]
        proj = h.projections[level - 1]
        raw = eqrank_relation(parent)
        hubs, auths = root_hubs(parent), root_authorities(parent)
        raw_blocks = raw.blocks
        inside: dict[int, list[int]] = defaultdict(list)
        for b, members in enumerate(raw_blocks):
            inside[int(proj.labels[members[0]])].append(b)
        members0 = h.members(level)
        themes = []
        for t in range(h.graphs[level].n):
            if level == 1 and cores is not None and t in cores:
                core = cores[t]
            else:
                core = max(inside[t], key=lambda b: (len(raw_blocks[b]), -b))
            rep = raw_blocks[core][0]
            themes.append(
                Theme(
                    level=level,
                    block=t,
                    members=tuple(members0[t]),
                    root_hubs=tuple(sorted(hubs[rep])),
                    root_authorities=tuple(sorted(auths[rep])),
                )
            )
        out.append(themes)
    return out


def rebuild_hierarchy(g: WeightedDigraph, projections: Sequence[Partition], terminal=True) -> Hierarchy:
    """Recreate the level graphs from ``G_0`` and stored projections."""
    h = Hierarchy([g], terminal=terminal)
    cur = g
    for p in projections:
        cur = factor(cur, p).graph
        h.projections.append(p)
        h.graphs.append(cur)
    return h


# -- labels -----------------------------------------------------------------

_MATH = re.compile(r"\$[^$]*\$")
_TOKEN = re.compile(r"[a-z0-9]+(?:[-/'=+][a-z0-9]+)*")


def title_tokens(title: str, stop_words: Iterable[str]) -> list[str]:
    stop = stop_words if isinstance(stop_words, (set, frozenset)) else set(stop_words)
    text = _MATH.sub(" ", title.lower())
    return [t for t in _TOKEN.findall(text) if t not in stop]


def title_pairs(title: str, stop_words: Iterable[str]) -> list[str]:
    toks = title_tokens(title, stop_words)
    return [f"{a} {b}" for a, b in zip(toks, toks[1:])]


def _pair_counts(members, meta, stop) -> Counter:
    c: Counter = Counter()
    for v in members:
        doc = meta.get(v)
        if doc is not None and doc.title:
            c.update(title_pairs(doc.title, stop))
    return c


def label_themes(
    member_sets: Sequence[Iterable[int]],
    meta: Mapping[int, DocumentMeta],
    stop_words: Iterable[str] = DEFAULT_STOP_WORDS,
    n_pairs: int = LABEL_PAIRS,
) -> list[tuple[str, ...]]:
    """Word-pair labels for a set of sibling themes.

    score(pair) = count in theme titles * log(#themes / #themes using pair).
    Ties fall back to the raw count, then alphabetical order.
    """
    stop = frozenset(stop_words)
    counts = [_pair_counts(m, meta, stop) for m in member_sets]
    df: Counter = Counter()
    for c in counts:
        df.update(c.keys())
    n = len(counts)
    labels = []
    for i, c in enumerate(counts):
        if not c:
            log.warning("theme %d has no usable titles; label left empty", i)
            labels.append(())
            continue
        scored = sorted(c.items(), key=lambda kv: (-kv[1] * math.log(n / df[kv[0]]), -kv[1], kv[0]))
        labels.append(tuple(p for p, _ in scored[:n_pairs]))
    return labels


def label_theme(
    members: Iterable[int],
    meta: Mapping[int, DocumentMeta],
    stop_words: Iterable[str] = DEFAULT_STOP_WORDS,
    siblings: Sequence[Iterable[int]] = (),
) -> tuple[str, ...]:
    """Label one theme against its ``siblings`` (the other themes of its level)."""
    return label_themes([list(members), *siblings], meta, stop_words)[0]


# -- rankings ---------------------------------------------------------------


def attributed_weight(
    members: Iterable[int], g: WeightedDigraph, max_graph: WeightedDigraph | None = None
) -> dict[int, float]:
    """Sum of ``W(p', p)`` over members ``p'`` having ``p`` among their max-link targets.

    Only pairs with both ends in ``members`` count. A member with tied
    maxima contributes to every tied target. Pass ``max_graph`` (that is
    ``max_links(g)``) to reuse it across many themes.
    """
    mem = np.zeros(g.n, dtype=bool)
    idx = np.fromiter(members, dtype=np.int64)
    mem[idx] = True
    m = max_links(g) if max_graph is None else max_graph
    keep = mem[m.src] & mem[m.dst]
    totals = np.bincount(m.dst[keep], weights=m.weight[keep], minlength=g.n)
    return {int(v): float(totals[v]) for v in np.unique(idx)}


def max_graph_pair(g: WeightedDigraph) -> tuple[WeightedDigraph, WeightedDigraph]:
    """``(max_links(g), max_links(invert(g)))``, the inputs of the two rankings."""
    return max_links(g), max_links(invert(g))


def rank_papers(
    theme: Theme | Iterable[int],
    g: WeightedDigraph,
    top: int | None = TOP_N,
    max_graphs: tuple[WeightedDigraph, WeightedDigraph] | None = None,
) -> tuple[list[RankEntry], list[RankEntry]]:
    """Papers ordered by Authority Number and by Hub Number.

    Authority Number of ``p``: weights of the links from theme members whose
    local authority is ``p``. Hub Number: same over members whose local hub
    is ``p``, i.e. the authority attribution on the inverted graph.
    ``max_graphs`` comes from :func:`max_graph_pair` when ranking many themes.
    """
    members = theme.members if isinstance(theme, Theme) else tuple(theme)
    m, m_inv = max_graph_pair(g) if max_graphs is None else max_graphs
    auth = attributed_weight(members, g, m)
    hub = attributed_weight(members, g, m_inv)
    entries = [RankEntry(v, auth[v], hub[v]) for v in auth]
    return _rankings(entries, top)


def _rankings(entries: list[RankEntry], top: int | None):
    by_auth = sorted(entries, key=lambda e: (-e.authority_number, str(e.subject)))
    by_hub = sorted(entries, key=lambda e: (-e.hub_number, str(e.subject)))
    if top is not None:
        by_auth, by_hub = by_auth[:top], by_hub[:top]
    return by_auth, by_hub


def rank_authors(
    paper_ranks: Iterable[RankEntry],
    meta: Mapping[int, DocumentMeta],
    top: int | None = TOP_N,
) -> tuple[list[RankEntry], list[RankEntry]]:
    """Author numbers: sums over the author's papers; co-authors each get full credit.

    ``paper_ranks`` must hold every paper of the theme (call
    ``rank_papers(..., top=None)``), not a truncated top list.
    """
    auth: dict[str, float] = defaultdict(float)
    hub: dict[str, float] = defaultdict(float)
    seen = set()
    for e in paper_ranks:
        if e.subject in seen:
            continue
        seen.add(e.subject)
        doc = meta.get(e.subject)  # type: ignore[arg-type]
        if doc is None:
            continue
        for name in set(doc.authors):
            auth[name] += e.authority_number
            hub[name] += e.hub_number
    entries = [RankEntry(a, auth[a], hub[a]) for a in sorted(auth)]
    return _rankings(entries, top)
