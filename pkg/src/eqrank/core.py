"""EqRank partitions and the iterated factor-graph hierarchy.

Pipeline for one relation::

    g --max_links--> --condense_scc--> acyclic --root_sets--> per-vertex sink sets

``auth_relation`` runs it on ``g``, ``hub_relation`` on ``invert(g)``, and
``eqrank_relation`` intersects the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import WeightedDigraph


@dataclass(frozen=True, eq=False)
class Partition:
    """Total map vertex -> block id, blocks numbered by their smallest vertex."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if len(labels):
            # canonical numbering: first appearance order, dense 0..k-1
            first_seen = np.maximum.accumulate(labels)
            if labels[0] != 0 or np.any(np.diff(first_seen) > 1) or labels.min() < 0:
                raise ValueError("labels are not in canonical first-appearance order")

    @classmethod
    def from_keys(cls, keys: Sequence[Hashable]) -> "Partition":
        """Group vertices by equal keys."""
        ids: dict[Hashable, int] = {}
        return cls(np.array([ids.setdefault(k, len(ids)) for k in keys], dtype=np.int64))

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        return cls.from_keys(np.asarray(labels).tolist())

    @classmethod
    def from_blocks(cls, n: int, blocks: Sequence[Sequence[int]]) -> "Partition":
        keys = [-1] * n
        for b, members in enumerate(blocks):
            for v in members:
                if keys[v] != -1:
                    raise ValueError(f"vertex {v} appears in two blocks")
                keys[v] = b
        if -1 in keys:
            raise ValueError("blocks do not cover every vertex")
        return cls.from_keys(keys)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def n_blocks(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    @property
    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for v, b in enumerate(self.labels.tolist()):
            out[b].append(v)
        return out

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_blocks)

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(b) for b in self.blocks}

    def refines(self, other: "Partition") -> bool:
        """True if every block of ``self`` lies inside one block of ``other``."""
        seen: dict[int, int] = {}
        for a, b in zip(self.labels.tolist(), other.labels.tolist()):
            if seen.setdefault(a, b) != b:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"Partition(n={self.n}, blocks={self.n_blocks})"


@dataclass(frozen=True)
class FactorGraph:
    graph: WeightedDigraph
    projection: Partition


@dataclass
class Hierarchy:
    """Graphs ``G_0, G_1, ...``; ``projections[i]`` maps ``G_i`` onto ``G_{i+1}``."""

    graphs: list[WeightedDigraph]
    projections: list[Partition] = field(default_factory=list)
    terminal: bool = False

    @property
    def sizes(self) -> list[int]:
        return [g.n for g in self.graphs]

    def membership(self, level: int) -> np.ndarray:
        """Block of ``G_level`` containing each ``G_0`` vertex."""
        lab = np.arange(self.graphs[0].n)
        for p in self.projections[:level]:
            lab = p.labels[lab]
        return lab

    def members(self, level: int) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.graphs[level].n)]
        for v, b in enumerate(self.membership(level).tolist()):
            out[b].append(v)
        return out


def invert(g: WeightedDigraph) -> WeightedDigraph:
    order = np.lexsort((g.src, g.dst))
    return WeightedDigraph(g.n, g.dst[order], g.src[order], g.weight[order], g.ids)


def max_links(g: WeightedDigraph) -> WeightedDigraph:
    """Keep, for each vertex, all outgoing links of maximal weight (ties kept)."""
    if g.n_edges == 0:
        return g
    best = np.full(g.n, -np.inf)
    np.maximum.at(best, g.src, g.weight)
    keep = g.weight == best[g.src]
    return WeightedDigraph(g.n, g.src[keep], g.dst[keep], g.weight[keep], g.ids)


def sinks(g: WeightedDigraph) -> set[int]:
    return set(np.flatnonzero(g.out_degree == 0).tolist())


def factor(g: WeightedDigraph, r: Partition) -> FactorGraph:
    """Factor graph: one vertex per block, cross-block weights summed."""
    if r.n != g.n:
        raise ValueError(f"partition covers {r.n} vertices, graph has {g.n}")
    bs, bd = r.labels[g.src], r.labels[g.dst]
    cross = bs != bd
    k = r.n_blocks
    fg = WeightedDigraph.from_edges(
        k, np.column_stack([bs[cross], bd[cross]]), g.weight[cross], combine="sum"
    )
    return FactorGraph(fg, r)


def scc_partition(g: WeightedDigraph) -> Partition:
    if g.n == 0:
        return Partition.from_labels([])
    adj = coo_matrix((np.ones(g.n_edges), (g.src, g.dst)), shape=(g.n, g.n))
    _, labels = connected_components(adj, directed=True, connection="strong")
    return Partition.from_labels(labels)


def condense_scc(g: WeightedDigraph) -> FactorGraph:
    return factor(g, scc_partition(g))


def topological_order(g: WeightedDigraph) -> list[int]:
    """Kahn's algorithm, smallest ready vertex first; raises on cycles."""
    import heapq

    indeg = g.in_degree.tolist()
    succ = g.successors
    ready = [v for v in range(g.n) if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(order) != g.n:
        raise ValueError("graph has a cycle")
    return order


def root_sets(g: WeightedDigraph) -> list[frozenset[int]]:
    """Sinks reachable from each vertex of an acyclic graph.

    A sink reaches itself, so its root set is ``{sink}``.
    """
    succ = g.successors
    roots: list[frozenset[int] | None] = [None] * g.n
    for v in reversed(topological_order(g)):
        nxt = succ[v]
        if not nxt:
            roots[v] = frozenset((v,))
        elif len(nxt) == 1:
            roots[v] = roots[nxt[0]]
        else:
            acc = set()
            for w in nxt:
                acc |= roots[w]
            roots[v] = frozenset(acc)
    return roots  # type: ignore[return-value]


def root_members(h: WeightedDigraph) -> list[frozenset[int]]:
    """Root set of every vertex of ``h`` lifted through SCC condensation.

    Each entry lists the original vertices of the sink components reachable
    from the vertex's own component.
    """
    fg = condense_scc(h)
    comp_roots = root_sets(fg.graph)
    blocks = fg.projection.blocks
    lifted: dict[frozenset[int], frozenset[int]] = {}
    for rs in comp_roots:
        if rs not in lifted:
            lifted[rs] = frozenset(v for b in rs for v in blocks[b])
    return [lifted[comp_roots[b]] for b in fg.projection.labels.tolist()]


def root_authorities(g: WeightedDigraph) -> list[frozenset[int]]:
    return root_members(max_links(g))


def root_hubs(g: WeightedDigraph) -> list[frozenset[int]]:
    return root_members(max_links(invert(g)))


def auth_relation(g: WeightedDigraph) -> Partition:
    return Partition.from_keys(root_authorities(g))


def hub_relation(g: WeightedDigraph) -> Partition:
    return Partition.from_keys(root_hubs(g))


def intersect(p: Partition, q: Partition) -> Partition:
    if p.n != q.n:
        raise ValueError("partitions of different vertex sets")
    return Partition.from_keys(list(zip(p.labels.tolist(), q.labels.tolist())))


def eqrank_relation(g: WeightedDigraph) -> Partition:
    return intersect(hub_relation(g), auth_relation(g))


def local_authorities(g: WeightedDigraph) -> list[list[int]]:
    """Max-link targets of each vertex (its local authorities)."""
    return max_links(g).successors


def local_hubs(g: WeightedDigraph) -> list[list[int]]:
    """Max-weight citers of each vertex (its local hubs)."""
    return max_links(invert(g)).successors


LevelHook = Callable[[int, WeightedDigraph, Partition], Partition]


def eqrank_hierarchy(
    g: WeightedDigraph, hook: LevelHook | None = None, max_levels: int | None = None
) -> Hierarchy:
    """Iterate ``G_i = G_{i-1} / EqRank(G_{i-1})`` until the size stops shrinking.

    ``hook(level, graph, partition)`` may replace the partition computed at
    each level before factoring (used for the level-1 cutoff).
    """
    h = Hierarchy([g])
    cur = g
    while max_levels is None or len(h.projections) < max_levels:
        p = eqrank_relation(cur)
        if hook is not None:
            p = hook(len(h.projections), cur, p)
        if p.n_blocks >= cur.n:
            h.terminal = True
            break
        cur = factor(cur, p).graph
        h.projections.append(p)
        h.graphs.append(cur)
    return h


def eqrank_prime_oracle(g: WeightedDigraph, max_vertices: int = 15) -> Partition:
    """Brute-force EqRank' on a small acyclic graph.

    ``Fe(x)`` is the successor set, or ``{x}`` for a sink; ``Fe(X)`` is the
    union over ``X``. Vertices are equivalent when ``Fe^n`` agrees for ``n``
    past the longest path.
    """
    n = g.n
    if n > max_vertices:
        raise ValueError(f"oracle limited to {max_vertices} vertices, got {n}")
    adj = [[False] * n for _ in range(n)]
    for x, y in g.edges():
        adj[x][y] = True
    # transitive closure by Warshall, to reject cycles independently
    reach = [row[:] for row in adj]
    for k, i in product(range(n), repeat=2):
        if reach[i][k]:
            reach[i] = [a or b for a, b in zip(reach[i], reach[k])]
    if any(reach[i][i] for i in range(n)):
        raise ValueError("oracle requires an acyclic graph")

    def fe(xs: frozenset[int]) -> frozenset[int]:
        out: set[int] = set()
        for x in xs:
            nxt = {y for y in range(n) if adj[x][y]}
            out |= nxt if nxt else {x}
        return frozenset(out)

    images = []
    for x in range(n):
        cur = frozenset((x,))
        for _ in range(n + 1):
            cur = fe(cur)
        images.append(cur)
    return Partition.from_keys(images)
