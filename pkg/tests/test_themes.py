import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from eqrank.core import Partition, eqrank_relation, invert, max_links
from eqrank.evaluation import generate_test_graph
from eqrank.graph import DocumentMeta, WeightedDigraph, compute_weights
from eqrank.themes import (
    CutoffConfig,
    CutoffError,
    Theme,
    absorb_small_themes,
    attributed_weight,
    build_theme_hierarchy,
    label_theme,
    label_themes,
    rank_authors,
    rank_papers,
    title_pairs,
)

from conftest import digraphs


def blocks_graph(sizes, links):
    """Graph on consecutive blocks; ``links`` are ``(u, v, w)`` vertex edges."""
    n = sum(sizes)
    keys = [b for b, s in enumerate(sizes) for _ in range(s)]
    g = WeightedDigraph.from_edges(n, [(u, v) for u, v, _ in links], [w for *_, w in links])
    return g, Partition.from_keys(keys)


def test_small_block_merged_into_only_candidate():
    g, p = blocks_graph([25, 3], [(25, 0, 2.5), (1, 26, 2.0)])
    ab = absorb_small_themes(g, p, CutoffConfig(20))
    assert ab.partition.n_blocks == 1
    assert ab.orphans == []


def test_tie_goes_to_smaller_block_id():
    g, p = blocks_graph([20, 20, 2], [(40, 0, 1.0), (41, 20, 1.0)])
    ab = absorb_small_themes(g, p, CutoffConfig(20))
    assert ab.partition.as_sets() == {frozenset(list(range(20)) + [40, 41]), frozenset(range(20, 40))}


def test_closeness_ignores_direction():
    # block 2 sends 1.0 to block 0 but receives 1.5 from block 1
    g, p = blocks_graph([20, 20, 2], [(40, 0, 1.0), (20, 41, 1.5)])
    ab = absorb_small_themes(g, p, CutoffConfig(20))
    assert ab.partition.labels[40] == ab.partition.labels[20]


def test_orphan_kept():
    g, p = blocks_graph([20, 2], [(20, 21, 1.0), (20, 0, 0.0)])
    ab = absorb_small_themes(g, p, CutoffConfig(20))
    assert ab.partition.n_blocks == 2
    assert ab.orphans == [1]


def test_no_actual_theme_is_an_error():
    g, p = blocks_graph([3, 3], [(0, 3, 1.0)])
    with pytest.raises(CutoffError, match="lower the cutoff"):
        absorb_small_themes(g, p, CutoffConfig(20))


def test_cutoff_config_validated():
    with pytest.raises(ValueError):
        CutoffConfig(0)


def test_small_blocks_do_not_chain():
    # block 2 only touches small block 1; block 1 touches actual block 0
    g, p = blocks_graph([5, 2, 2], [(5, 0, 1.0), (7, 5, 9.0)])
    ab = absorb_small_themes(g, p, CutoffConfig(5))
    assert ab.partition.labels[5] == ab.partition.labels[0]
    assert ab.orphans == [ab.partition.labels[7]]


@given(digraphs(max_n=25), st.integers(1, 6))
def test_absorption_conserves_and_never_splits(g, f):
    p = eqrank_relation(g)
    if p.n_blocks == 0 or p.sizes.max() < f:
        return
    ab = absorb_small_themes(g, p, CutoffConfig(f))
    q = ab.partition
    assert q.n == p.n
    assert p.refines(q)
    sizes = q.sizes
    for b in range(q.n_blocks):
        assert sizes[b] >= f or b in ab.orphans
    # every actual block survives as its own block
    actual = [b for b in range(p.n_blocks) if p.sizes[b] >= f]
    assert len({int(q.labels[p.blocks[b][0]]) for b in actual}) == len(actual)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_level_one_count_monotone_in_cutoff(seed):
    g = compute_weights(generate_test_graph("citation_like", seed=seed, n=150, out_degree=4))
    counts = []
    for f in (1, 2, 3, 5, 8, 13):
        try:
            ab = absorb_small_themes(g, eqrank_relation(g), CutoffConfig(f))
        except CutoffError:
            counts.append(0)
            continue
        counts.append(ab.partition.n_blocks - len(ab.orphans))
    assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_level_one_collapse_gives_one_level():
    # a single citation chain shares one root hub and one root authority
    g = WeightedDigraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    th = build_theme_hierarchy(g, CutoffConfig(2))
    assert th.level_sizes == [1]
    assert th.n_levels == 1


def test_theme_hierarchy_levels_and_members(seven):
    th = build_theme_hierarchy(seven, CutoffConfig(3))
    lvl1 = th.themes[0]
    assert sorted(t.size for t in lvl1) == [3, 4]
    assert sum(t.size for t in lvl1) == 7
    for t in lvl1:
        assert t.root_hubs and t.root_authorities
    # every level covers all papers exactly once
    for lvl in th.themes:
        assert sorted(v for t in lvl for v in t.members) == list(range(7))


def test_theme_roots(seven):
    th = build_theme_hierarchy(seven, CutoffConfig(3))
    by_members = {frozenset(t.members): t for t in th.themes[0]}
    t = by_members[frozenset({1, 3, 6})]
    assert t.root_hubs == (6,) and t.root_authorities == (1,)


# -- labels -----------------------------------------------------------------


def meta_of(titles, authors=None):
    authors = authors or {}
    return {v: DocumentMeta(v, t, tuple(authors.get(v, ())), 2000) for v, t in titles.items()}


def test_title_pairs_skip_stop_words_and_math():
    pairs = title_pairs("On the Tachyon Condensation in $AdS_5$ String Theory", {"on", "the", "in"})
    assert pairs == ["tachyon condensation", "condensation string", "string theory"]


def test_label_prefers_unique_frequent_pair():
    words = "alpha beta gamma delta epsilon zeta eta theta iota kappa".split()
    titles = {i: f"Tachyon condensation: {w} case" for i, w in enumerate(words)}
    titles.update({10 + i: f"Random matrix {w} ensembles" for i, w in enumerate(words)})
    labels = label_themes([range(10), range(10, 20)], meta_of(titles))
    assert labels[0][0] == "tachyon condensation"
    assert labels[1][0] == "random matrix"


def test_shared_pair_ranks_below_specific():
    titles = {0: "string theory black holes", 1: "string theory black holes",
              2: "string theory gauge fields", 3: "string theory gauge fields"}
    lab = label_theme([0, 1], meta_of(titles), siblings=[[2, 3]])
    assert lab.index("string theory") > lab.index("black holes")


def test_label_at_most_seven_pairs_verbatim():
    titles = {0: "alpha beta gamma delta epsilon zeta eta theta iota kappa"}
    stop = {"delta"}
    lab = label_theme([0], meta_of(titles), stop)
    assert len(lab) == 7
    for pair in lab:
        assert not set(pair.split()) & stop
        a, b = pair.split()
        assert f"{a} {b}" in "alpha beta gamma epsilon zeta eta theta iota kappa"


def test_empty_titles_give_empty_label(caplog):
    assert label_theme([0], meta_of({0: ""})) == ()
    assert "no usable titles" in caplog.text


# -- rankings ---------------------------------------------------------------


def test_authority_direct_sum():
    # papers 1, 2, 3 cite only paper 0
    g = WeightedDigraph.from_edges(4, [(1, 0), (2, 0), (3, 0)], [1.0, 2.0, 3.0])
    by_auth, _ = rank_papers(Theme(1, 0, (0, 1, 2, 3)), g)
    assert by_auth[0].subject == 0 and by_auth[0].authority_number == 6.0


def test_isolated_theme_scores_zero():
    g = WeightedDigraph.from_edges(3, [(1, 2)], [5.0])
    by_auth, by_hub = rank_papers([0], g)
    assert by_auth[0].authority_number == 0 and by_hub[0].hub_number == 0


def test_eight_vertex_ranking_table(eight):
    # frozen from a hand-built local authority/hub map (ties credited to each)
    auth, hub = rank_papers(range(8), eight, top=None)
    a = {e.subject: e.authority_number for e in auth}
    h = {e.subject: e.hub_number for e in hub}
    assert a == {0: 6, 1: 4, 2: 3, 3: 1, 4: 1, 5: 4, 6: 0, 7: 0}
    assert h == {0: 0, 1: 0, 2: 0, 3: 6, 4: 0, 5: 3, 6: 2, 7: 6}
    assert [e.subject for e in auth[:3]] == [0, 1, 5]


def test_author_tables(eight):
    authors = {0: ["ann"], 1: ["ann", "bob"], 2: ["bob"], 3: ["cy"], 4: ["cy", "ann"],
               5: ["bob"], 6: ["cy"], 7: ["ann"]}
    meta = meta_of({v: "t" for v in range(8)}, authors)
    auth, _ = rank_papers(range(8), eight, top=None)
    by_auth, by_hub = rank_authors(auth, meta)
    assert {e.subject: e.authority_number for e in by_auth} == {"ann": 11, "bob": 11, "cy": 2}
    assert {e.subject: e.hub_number for e in by_hub} == {"ann": 6, "bob": 3, "cy": 8}
    assert [e.subject for e in by_hub] == ["cy", "ann", "bob"]


def test_single_author_gets_everything(eight):
    meta = meta_of({v: "t" for v in range(8)}, {v: ["solo"] for v in range(8)})
    auth, _ = rank_papers(range(8), eight, top=None)
    (entry,), _ = rank_authors(auth, meta)
    assert entry.authority_number == sum(e.authority_number for e in auth)


@given(digraphs(max_n=12), st.data())
def test_authority_conservation(g, data):
    members = data.draw(st.sets(st.integers(0, max(g.n - 1, 0)), max_size=g.n)) if g.n else set()
    total = attributed_weight(members, g)
    m = max_links(g)
    direct = sum(w for (s, d), w in m.edge_weights().items() if s in members and d in members)
    assert sum(total.values()) == pytest.approx(direct)


@given(digraphs(max_n=12))
def test_hub_numbers_are_authority_of_inverse(g):
    _, hub = rank_papers(range(g.n), g, top=None)
    auth_inv, _ = rank_papers(range(g.n), invert(g), top=None)
    assert {e.subject: e.hub_number for e in hub} == {e.subject: e.authority_number for e in auth_inv}
