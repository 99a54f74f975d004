"""On-disk formats for hierarchies, theme reports and evaluation tables.

Hierarchy file (``hierarchy.json``)::

    {"format": "eqrank-hierarchy", "version": 1, "f_cut": 20,
     "components": [
        {"component": 0,
         "vertices": [...],          # global vertex ids, ascending; local id = position
         "status": "clustered" | "below_cutoff",
         "level_sizes": [n0, n1, ...],
         "n_levels": 2,
         "orphans": [...],           # level-1 block ids kept as orphans
         "projections": [[...], ...] # projections[i][v] = block of G_{i+1} holding v of G_i
        }, ...]}

Theme records (``themes.jsonl``): one JSON object per theme with keys
``component, level, theme, size, label, root_hubs, root_authorities,
top_papers_by_authority, top_papers_by_hub, top_authors_by_authority,
top_authors_by_hub``. Ranked entries are ``[subject, authority, hub]``.
"""

from __future__ import annotations

import json
from typing import Any, Iterable

from .core import Partition

HIERARCHY_FORMAT = "eqrank-hierarchy"
HIERARCHY_VERSION = 1


def hierarchy_record(component: int, vertices, status: str, th=None) -> dict[str, Any]:
    rec: dict[str, Any] = {
        "component": component,
        "vertices": [int(v) for v in vertices],
        "status": status,
    }
    if th is not None:
        rec["level_sizes"] = th.hierarchy.sizes
        rec["n_levels"] = th.n_levels
        rec["orphans"] = list(th.orphans)
        rec["projections"] = [p.labels.tolist() for p in th.hierarchy.projections]
    return rec


def dumps_hierarchy(records: Iterable[dict], f_cut: int) -> str:
    doc = {
        "format": HIERARCHY_FORMAT,
        "version": HIERARCHY_VERSION,
        "f_cut": f_cut,
        "components": list(records),
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def loads_hierarchy(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("format") != HIERARCHY_FORMAT:
        raise ValueError("not a hierarchy file")
    for rec in doc["components"]:
        rec["projections"] = [Partition.from_labels(p) for p in rec.get("projections", [])]
    return doc


def write_tsv(path, header: list[str], rows: Iterable[Iterable[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_cell(c) for c in row) + "\n")


def _cell(c) -> str:
    if isinstance(c, float):
        return f"{c:.4f}"
    if c is None:
        return ""
    return str(c)
