"""Weighted digraph container, edge-list/metadata ingestion and link weights.

Edge ``(x, y)`` always means "x cites y".
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import IO, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

log = logging.getLogger(__name__)

GRAPH_FORMAT = "eqrank-graph"
GRAPH_FORMAT_VERSION = 1


class IngestError(ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class WeightedDigraph:
    """Immutable directed graph on dense ids ``0..n-1``.

    Edges are stored sorted by ``(src, dst)``, without self-loops or
    duplicates. Use :meth:`from_edges` to build one from arbitrary input.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        src = np.ascontiguousarray(self.src, dtype=np.int64)
        dst = np.ascontiguousarray(self.dst, dtype=np.int64)
        w = np.ascontiguousarray(self.weight, dtype=np.float64)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "weight", w)
        for arr in (src, dst, w):
            arr.setflags(write=False)
        if not (len(src) == len(dst) == len(w)):
            raise ValueError("src, dst and weight must have equal length")
        if len(src):
            if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(src == dst):
                raise ValueError("self-loops are not allowed")
            key = src * self.n + dst
            if np.any(np.diff(key) <= 0):
                raise ValueError("edges must be sorted by (src, dst) and unique")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("edge weights must be finite and nonnegative")
        if self.ids is not None:
            if len(self.ids) != self.n or len(set(self.ids)) != self.n:
                raise ValueError("id map must be a bijection onto 0..n-1")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Iterable[float] | None = None,
        ids: Sequence[str] | None = None,
        combine: str = "first",
    ) -> "WeightedDigraph":
        """Normalize raw edges: drop self-loops, merge duplicates, sort.

        ``combine`` decides the weight of merged duplicates: ``"first"`` keeps
        the first occurrence, ``"sum"`` adds them up.
        """
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if weights is None:
            w = np.ones(len(edges))
        else:
            w = np.asarray(list(weights), dtype=np.float64)
        if len(w) != len(edges):
            raise ValueError("weights and edges differ in length")
        keep = edges[:, 0] != edges[:, 1]
        edges, w = edges[keep], w[keep]
        key = edges[:, 0] * max(n, 1) + edges[:, 1]
        uniq, first, inverse = np.unique(key, return_index=True, return_inverse=True)
        if combine == "first":
            w = w[first]
        elif combine == "sum":
            w = np.bincount(inverse, weights=w, minlength=len(uniq))
        else:
            raise ValueError(f"unknown combine mode {combine!r}")
        src, dst = np.divmod(uniq, max(n, 1))
        return cls(n, src, dst, w, tuple(ids) if ids is not None else None)

    @classmethod
    def empty(cls, n: int = 0) -> "WeightedDigraph":
        return cls(n, np.zeros(0), np.zeros(0), np.zeros(0))

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def edge_weights(self) -> dict[tuple[int, int], float]:
        return dict(zip(self.edges(), self.weight.tolist()))

    def with_weights(self, weight: np.ndarray) -> "WeightedDigraph":
        return WeightedDigraph(self.n, self.src, self.dst, weight, self.ids)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n)

    @cached_property
    def successors(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for s, d in zip(self.src.tolist(), self.dst.tolist()):
            out[s].append(d)
        return out

    @cached_property
    def predecessors(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for s, d in zip(self.src.tolist(), self.dst.tolist()):
            inc[d].append(s)
        return inc

    def external_id(self, v: int) -> str:
        return self.ids[v] if self.ids is not None else str(v)

    def subgraph(self, vertices: Sequence[int]) -> "WeightedDigraph":
        """Induced subgraph; vertex ``vertices[i]`` becomes ``i``."""
        vertices = np.asarray(sorted(vertices), dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[vertices] = np.arange(len(vertices))
        keep = (local[self.src] >= 0) & (local[self.dst] >= 0)
        ids = None
        if self.ids is not None:
            ids = tuple(self.ids[v] for v in vertices.tolist())
        # order is preserved because the relabeling is monotone
        return WeightedDigraph(
            len(vertices), local[self.src[keep]], local[self.dst[keep]], self.weight[keep], ids
        )

    def same_as(self, other: "WeightedDigraph") -> bool:
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
            and self.ids == other.ids
        )

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"WeightedDigraph(n={self.n}, m={self.n_edges})"


@dataclass
class IngestReport:
    n_lines: int = 0
    duplicates: int = 0
    self_loops: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class DocumentMeta:
    vertex: int
    title: str
    authors: tuple[str, ...]
    year: int
    month: int | None = None


@dataclass(frozen=True)
class WeightConfig:
    """Mix between co-citation (``a``) and bibliographic coupling (``1 - a``)."""

    a: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"a must lie in [0, 1], got {self.a}")

    def as_fraction(self) -> Fraction:
        return Fraction(str(self.a)).limit_denominator(10**6)


def _lines(source: IO | str | bytes | Iterable[str]) -> Iterable[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        return source.splitlines()
    return (ln.decode("utf-8") if isinstance(ln, bytes) else ln for ln in source)


def load_graph(source, format: str = "tsv", report: IngestReport | None = None) -> WeightedDigraph:
    """Parse an edge list into a normalized unit-weight graph.

    ``format="tsv"`` reads ``src<TAB>dst`` lines with ``#`` comments;
    ``format="json"`` reads the normalized serialization written by
    :func:`dump_graph`.
    """
    if format == "json":
        text = source if isinstance(source, (str, bytes)) else source.read()
        return loads_graph(text)
    if format != "tsv":
        raise ValueError(f"unknown edge-list format {format!r}")
    report = report if report is not None else IngestReport()
    index: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(_lines(source), start=1):
        report.n_lines = lineno
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise IngestError(f"expected 'src<TAB>dst', got {raw!r}", lineno)
        u = index.setdefault(parts[0].strip(), len(index))
        v = index.setdefault(parts[1].strip(), len(index))
        if u == v:
            report.self_loops += 1
            continue
        if (u, v) in seen:
            report.duplicates += 1
            continue
        seen.add((u, v))
        edges.append((u, v))
    if report.self_loops:
        log.info("dropped %d self-loops", report.self_loops)
    if report.duplicates:
        log.info("collapsed %d duplicate edges", report.duplicates)
    ids = [None] * len(index)
    for k, i in index.items():
        ids[i] = k
    return WeightedDigraph.from_edges(len(ids), edges, ids=ids)


_DATE = re.compile(r"^(\d{4})(?:-(\d{1,2}))?$")


def load_metadata(
    source,
    g: WeightedDigraph,
    year_range: tuple[int, int] = (1950, 2100),
    report: IngestReport | None = None,
) -> dict[int, DocumentMeta]:
    """Read ``id<TAB>date<TAB>title<TAB>author1;author2`` records.

    Records whose id is not a vertex of ``g`` are skipped with a warning.
    """
    report = report if report is not None else IngestReport()
    if g.ids is None:
        lookup = {str(i): i for i in range(g.n)}
    else:
        lookup = {k: i for i, k in enumerate(g.ids)}
    meta: dict[int, DocumentMeta] = {}
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 3:
            raise IngestError("expected 'id<TAB>date<TAB>title[<TAB>authors]'", lineno)
        ext, date, title = parts[0].strip(), parts[1].strip(), parts[2].strip()
        authors = parts[3] if len(parts) > 3 else ""
        m = _DATE.match(date)
        if not m:
            raise IngestError(f"bad date {date!r}", lineno)
        year = int(m.group(1))
        month = int(m.group(2)) if m.group(2) else None
        if not year_range[0] <= year <= year_range[1]:
            raise IngestError(f"year {year} outside {year_range}", lineno)
        if ext not in lookup:
            report.warnings.append(f"line {lineno}: id {ext!r} is not a graph vertex")
            continue
        names = tuple(a for a in (normalize_author(x) for x in authors.split(";")) if a)
        meta[lookup[ext]] = DocumentMeta(lookup[ext], title, names, year, month)
    return meta


def normalize_author(name: str) -> str:
    return " ".join(name.replace(".", ". ").split()).strip().lower()


def dumps_graph(g: WeightedDigraph) -> str:
    """Single-file JSON serialization; floats are written with ``repr`` precision."""
    doc = {
        "format": GRAPH_FORMAT,
        "version": GRAPH_FORMAT_VERSION,
        "n": g.n,
        "ids": list(g.ids) if g.ids is not None else None,
        "edges": [[s, d, w] for (s, d), w in zip(g.edges(), g.weight.tolist())],
    }
    return json.dumps(doc, separators=(",", ":"))


def loads_graph(text: str | bytes) -> WeightedDigraph:
    doc = json.loads(text)
    if doc.get("format") != GRAPH_FORMAT:
        raise IngestError("not a normalized graph file")
    edges = doc["edges"]
    return WeightedDigraph(
        doc["n"],
        np.array([e[0] for e in edges], dtype=np.int64),
        np.array([e[1] for e in edges], dtype=np.int64),
        np.array([e[2] for e in edges], dtype=np.float64),
        tuple(doc["ids"]) if doc["ids"] is not None else None,
    )


def weakly_connected_components(g: WeightedDigraph):
    """Partition of ``g`` into weak components, numbered by smallest member."""
    from .core import Partition

    if g.n == 0:
        return Partition.from_labels([])
    adj = coo_matrix((np.ones(g.n_edges), (g.src, g.dst)), shape=(g.n, g.n))
    _, labels = connected_components(adj, directed=True, connection="weak")
    return Partition.from_labels(labels)


def cocitation_counts(g: WeightedDigraph) -> np.ndarray:
    """Per-edge ``|{p : p->x and p->y}|``, i.e. ``(A^T A)[x, y]`` on E."""
    citers = [set(p) for p in g.predecessors]
    return np.array(
        [len(citers[x] & citers[y]) for x, y in zip(g.src.tolist(), g.dst.tolist())],
        dtype=np.int64,
    )


def coupling_counts(g: WeightedDigraph) -> np.ndarray:
    """Per-edge ``|{p : x->p and y->p}|``, i.e. ``(A A^T)[x, y]`` on E."""
    refs = [set(s) for s in g.successors]
    return np.array(
        [len(refs[x] & refs[y]) for x, y in zip(g.src.tolist(), g.dst.tolist())],
        dtype=np.int64,
    )


def compute_weights(g: WeightedDigraph, cfg: WeightConfig = WeightConfig()) -> WeightedDigraph:
    """Replace weights with ``a * cocitation + (1 - a) * coupling`` on existing links.

    The mix is evaluated as an exact rational and rounded once, so
    ``a=0.9`` with two shared references gives exactly ``0.2``.
    """
    frac = cfg.as_fraction()
    num, den = frac.numerator, frac.denominator
    co = cocitation_counts(g)
    cp = coupling_counts(g)
    w = (num * co + (den - num) * cp) / den
    return g.with_weights(w)


@dataclass(frozen=True)
class DegreeStats:
    n: int
    out_degree_one: float
    in_degree_one: float
    sinks: float
    sources: float


def degree_stats(g: WeightedDigraph) -> DegreeStats:
    if g.n == 0:
        return DegreeStats(0, 0.0, 0.0, 0.0, 0.0)
    out, inc = g.out_degree, g.in_degree
    return DegreeStats(
        g.n,
        float(np.mean(out == 1)),
        float(np.mean(inc == 1)),
        float(np.mean(out == 0)),
        float(np.mean(inc == 0)),
    )

