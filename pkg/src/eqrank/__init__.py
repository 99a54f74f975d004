"""EqRank hierarchical clustering of directed weighted graphs."""

from .core import (
    FactorGraph,
    Hierarchy,
    Partition,
    auth_relation,
    condense_scc,
    eqrank_hierarchy,
    eqrank_prime_oracle,
    eqrank_relation,
    factor,
    hub_relation,
    invert,
    local_authorities,
    local_hubs,
    max_links,
    root_sets,
    sinks,
)
from .graph import (
    DocumentMeta,
    WeightConfig,
    WeightedDigraph,
    compute_weights,
    degree_stats,
    load_graph,
    load_metadata,
    weakly_connected_components,
)

__all__ = [
    "FactorGraph",
    "Hierarchy",
    "Partition",
    "auth_relation",
    "condense_scc",
    "eqrank_hierarchy",
    "eqrank_prime_oracle",
    "eqrank_relation",
    "factor",
    "hub_relation",
    "invert",
    "local_authorities",
    "local_hubs",
    "max_links",
    "root_sets",
    "sinks",
    "DocumentMeta",
    "WeightConfig",
    "WeightedDigraph",
    "compute_weights",
    "degree_stats",
    "load_graph",
    "load_metadata",
    "weakly_connected_components",
]

__version__ = "0.1.0"
