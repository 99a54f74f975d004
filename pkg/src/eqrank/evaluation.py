"""Community index, theme dynamics, reference overlap and synthetic graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import DocumentMeta, WeightedDigraph

log = logging.getLogger(__name__)


def inner_outer_weight(g: WeightedDigraph, members: Iterable[int]) -> tuple[float, float]:
    """Weight of links inside the set, and of links leaving it."""
    mask = np.zeros(g.n, dtype=bool)
    mask[list(members)] = True
    from_in = mask[g.src]
    to_in = mask[g.dst]
    inner = float(g.weight[from_in & to_in].sum())
    outer = float(g.weight[from_in & ~to_in].sum())
    return inner, outer


def community_index(g: WeightedDigraph, members: Iterable[int]) -> float:
    """``inner / (inner + outer)``; 1.0 when the theme has no outgoing weight at all."""
    members = list(members)
    if not members:
        raise ValueError("community index of an empty member set")
    inner, outer = inner_outer_weight(g, members)
    total = inner + outer
    if total == 0.0:
        return 1.0
    return inner / total


@dataclass
class CommunityReport:
    indices: list[float]
    sizes: list[int]

    @property
    def ideal(self) -> list[bool]:
        return [x > 0.5 for x in self.indices]

    @property
    def weighted_mean(self) -> float:
        total = sum(self.sizes)
        if total == 0:
            return float("nan")
        return sum(s * x for s, x in zip(self.sizes, self.indices)) / total


def community_report(g: WeightedDigraph, themes: Sequence[Sequence[int]]) -> CommunityReport:
    """Per-theme indices for one level; ``themes`` are member lists."""
    return CommunityReport(
        [community_index(g, m) for m in themes],
        [len(m) for m in themes],
    )


@dataclass(frozen=True)
class TrendConfig:
    """Thresholds for the trend classifier.

    ``eps`` is a fraction of the mean yearly count: slopes within
    ``+-eps * mean`` per year count as flat. A final-year count above
    ``burst_factor`` times the mean of the earlier years is a burst.
    """

    eps: float = 0.05
    burst_factor: float = 2.0
    min_years: int = 2


@dataclass
class TrendReport:
    years: list[int]
    counts: list[int]
    slope: float | None
    trend: str | None  # one of "+", "-", "0", "++"; None if unclassified


def classify_counts(counts: Sequence[float], cfg: TrendConfig = TrendConfig()) -> tuple[float, str]:
    """Least-squares slope and trend class of a yearly count series."""
    y = np.asarray(counts, dtype=float)
    if len(y) < max(cfg.min_years, 2):
        raise ValueError(f"need at least {max(cfg.min_years, 2)} years, got {len(y)}")
    x = np.arange(len(y), dtype=float)
    xc = x - x.mean()
    slope = float((xc * (y - y.mean())).sum() / (xc**2).sum())
    prior = y[:-1].mean()
    if y[-1] > cfg.burst_factor * prior:
        return slope, "++"
    tol = cfg.eps * y.mean()
    if slope > tol:
        return slope, "+"
    if slope < -tol:
        return slope, "-"
    return slope, "0"


def theme_dynamics(
    members: Iterable[int],
    meta: Mapping[int, DocumentMeta],
    window: tuple[int, int] | None = None,
    cfg: TrendConfig = TrendConfig(),
) -> TrendReport:
    """Yearly paper counts of a theme and their trend class.

    ``window`` is an inclusive year range; by default the span of dated
    metadata. Members without a date in the window are ignored.
    """
    if window is None:
        all_years = [d.year for d in meta.values()]
        if not all_years:
            log.warning("no dated metadata; theme left unclassified")
            return TrendReport([], [], None, None)
        window = (min(all_years), max(all_years))
    lo, hi = window
    years = list(range(lo, hi + 1))
    counts = [0] * len(years)
    for v in members:
        d = meta.get(v)
        if d is not None and lo <= d.year <= hi:
            counts[d.year - lo] += 1
    used = [y for y, c in zip(years, counts) if c]
    if len(years) < max(cfg.min_years, 2) or not used:
        log.warning("not enough dated members to classify a theme")
        return TrendReport(years, counts, None, None)
    slope, trend = classify_counts(counts, cfg)
    return TrendReport(years, counts, slope, trend)


def reference_overlap(
    members: Iterable[int], external: Iterable[int], universe: Iterable[int] | None = None
) -> float:
    """Share of an external reference list found in the theme.

    Ids outside ``universe`` (when given) are dropped with a warning.
    """
    ext = set(external)
    if universe is not None:
        known = set(universe)
        missing = ext - known
        if missing:
            log.warning("%d external ids are not in the graph; excluded", len(missing))
        ext &= known
    if not ext:
        raise ValueError("external reference list is empty")
    return len(ext & set(members)) / len(ext)


def generate_test_graph(model: str, seed: int = 0, **params) -> WeightedDigraph:
    """Seeded synthetic graphs with unit weights.

    ``poisson(n, p)``: each ordered pair is an edge with probability ``p``.
    ``layered_dag(layers, width, p)``: edges only from layer ``i`` to ``i+1``.
    ``citation_like(n, out_degree)``: vertex ``i`` cites up to ``out_degree``
    earlier vertices picked by preferential attachment (in-degree + 1).
    """
    rng = np.random.default_rng(seed)
    if model == "poisson":
        n, p = int(params.get("n", 100)), float(params.get("p", 0.05))
        if n < 0 or not 0 <= p <= 1:
            raise ValueError("poisson needs n >= 0 and 0 <= p <= 1")
        mask = rng.random((n, n)) < p
        np.fill_diagonal(mask, False)
        src, dst = np.nonzero(mask)
        return WeightedDigraph.from_edges(n, np.column_stack([src, dst]))
    if model == "layered_dag":
        layers = int(params.get("layers", 3))
        width = int(params.get("width", 4))
        p = float(params.get("p", 0.5))
        if layers < 1 or width < 1 or not 0 <= p <= 1:
            raise ValueError("layered_dag needs layers >= 1, width >= 1, 0 <= p <= 1")
        edges = []
        for layer in range(layers - 1):
            hit = rng.random((width, width)) < p
            for i, j in zip(*np.nonzero(hit)):
                edges.append((layer * width + int(i), (layer + 1) * width + int(j)))
        return WeightedDigraph.from_edges(layers * width, edges)
    if model == "citation_like":
        n = int(params.get("n", 1000))
        m = int(params.get("out_degree", 12))
        if n < 1 or m < 1:
            raise ValueError("citation_like needs n >= 1 and out_degree >= 1")
        return _citation_like(n, m, rng)
    raise ValueError(f"unknown model {model!r}")


def _citation_like(n: int, m: int, rng: np.random.Generator) -> WeightedDigraph:
    # pool holds every vertex once plus once per citation received
    pool = np.empty(n + n * m, dtype=np.int64)
    size = 0
    edges = []
    for i in range(n):
        k = min(i, m)
        chosen: set[int] = set()
        while len(chosen) < k:
            if len(chosen) >= i // 2 and i <= 2 * m:
                # tiny prefix: sample uniformly without replacement
                rest = [j for j in range(i) if j not in chosen]
                chosen.update(rng.choice(rest, size=k - len(chosen), replace=False).tolist())
                break
            chosen.add(int(pool[rng.integers(size)]))
        for j in sorted(chosen):
            edges.append((i, j))
            pool[size] = j
            size += 1
        pool[size] = i
        size += 1
    return WeightedDigraph.from_edges(n, edges)
