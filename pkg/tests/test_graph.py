import io

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from eqrank.graph import (
    IngestError,
    IngestReport,
    WeightConfig,
    WeightedDigraph,
    compute_weights,
    degree_stats,
    dumps_graph,
    load_graph,
    load_metadata,
    loads_graph,
    weakly_connected_components,
)

from conftest import digraphs
from oracles import dense_weights


def test_load_two_lines():
    g = load_graph("a\tb\nb\tc\n")
    assert g.n == 3 and g.n_edges == 2
    assert g.ids == ("a", "b", "c")
    assert g.edges() == [(0, 1), (1, 2)]


def test_duplicates_and_self_loops_reported():
    rep = IngestReport()
    g = load_graph("# comment\na\tb\na\tb\nc\tc\n\n", report=rep)
    assert g.edges() == [(0, 1)]
    assert rep.duplicates == 1
    assert rep.self_loops == 1
    assert g.n == 3  # c is kept as an isolated vertex


def test_malformed_line_has_line_number():
    with pytest.raises(IngestError, match="line 2"):
        load_graph("a\tb\nonly-one-field\n")


def test_load_from_byte_stream():
    g = load_graph(io.BytesIO("x\ty\n".encode()))
    assert g.ids == ("x", "y")


def test_ids_in_first_appearance_order():
    g = load_graph("z\ty\ny\tx\n")
    assert g.ids == ("z", "y", "x")


def test_metadata():
    g = load_graph("p1\tp2\n")
    rep = IngestReport()
    text = "p1\t2002-03\tRolling Tachyon\tSen, A.;  Doe J\np2\t1999\tOld\t\nzz\t2001\tGhost\tX\n"
    meta = load_metadata(text, g, report=rep)
    assert meta[0].year == 2002 and meta[0].month == 3
    assert meta[0].authors == ("sen, a.", "doe j")
    assert meta[1].authors == ()
    assert len(rep.warnings) == 1 and "zz" in rep.warnings[0]


def test_metadata_bad_year():
    g = load_graph("p1\tp2\n")
    with pytest.raises(IngestError, match="line 1"):
        load_metadata("p1\t1800\tT\tA\n", g)


def test_graph_invariants_enforced():
    with pytest.raises(ValueError):
        WeightedDigraph(2, [0], [0], [1.0])
    with pytest.raises(ValueError):
        WeightedDigraph(2, [0, 0], [1, 1], [1.0, 1.0])
    with pytest.raises(ValueError):
        WeightedDigraph(2, [0], [1], [-1.0])
    with pytest.raises(ValueError):
        WeightedDigraph(2, [], [], [], ids=("a", "a"))


def test_weak_components():
    g = load_graph("a\tb\nc\td\n")
    assert weakly_connected_components(g).as_sets() == {frozenset({0, 1}), frozenset({2, 3})}
    assert weakly_connected_components(WeightedDigraph.empty()).n_blocks == 0


@given(digraphs(max_n=15))
def test_weak_components_cover_and_connect(g):
    p = weakly_connected_components(g)
    assert sorted(v for b in p.blocks for v in b) == list(range(g.n))
    for block in p.blocks:
        # BFS ignoring direction inside the block
        bs = set(block)
        nbr = {v: set() for v in block}
        for x, y in g.edges():
            if x in bs and y in bs:
                nbr[x].add(y)
                nbr[y].add(x)
        seen, todo = {block[0]}, [block[0]]
        while todo:
            v = todo.pop()
            for w in nbr[v] - seen:
                seen.add(w)
                todo.append(w)
        assert seen == bs
    # no edge crosses two components
    for x, y in g.edges():
        assert p.labels[x] == p.labels[y]


def test_single_cociting_witness():
    # p=0 cites x=1 and y=2; x cites y; no shared references
    g = WeightedDigraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    w = compute_weights(g, WeightConfig(0.9)).edge_weights()
    assert w[(1, 2)] == 0.9


def test_two_shared_references():
    # x=0 -> y=1, both cite 2 and 3, nobody cites both
    g = WeightedDigraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    w = compute_weights(g, WeightConfig(0.9)).edge_weights()
    assert w[(0, 1)] == 0.2


def test_six_vertex_weight_table(six):
    # frozen from tests/oracles.dense_weights
    expected = {
        (0, 1): 0.2, (0, 2): 0.1, (0, 3): 0.0, (1, 2): 1.1, (1, 3): 0.9,
        (1, 4): 0.0, (2, 3): 1.8, (2, 4): 0.9, (3, 5): 0.0, (4, 5): 0.0,
    }
    assert compute_weights(six, WeightConfig(0.9)).edge_weights() == expected


def test_zero_weight_edges_kept(six):
    w = compute_weights(six)
    assert w.n_edges == six.n_edges
    assert (w.weight == 0).sum() == 4


def test_weight_config_range():
    with pytest.raises(ValueError):
        WeightConfig(1.5)


@given(digraphs(max_n=20, max_weight=1), st.sampled_from([0.0, 0.3, 0.9, 1.0]))
def test_weights_match_dense_products(g, a):
    got = compute_weights(g, WeightConfig(a)).edge_weights()
    assert got == dense_weights(g.n, g.edges(), a)


@given(digraphs(max_n=15))
def test_reciprocal_edges_get_equal_weight(g):
    w = compute_weights(g).edge_weights()
    for (x, y), val in w.items():
        if (y, x) in w:
            assert w[(y, x)] == val


@given(digraphs(max_n=30, max_weight=1))
@settings(max_examples=30)
def test_cocitation_brute_count(g):
    from eqrank.graph import cocitation_counts

    cites = set(g.edges())
    counts = cocitation_counts(g)
    for (x, y), c in zip(g.edges(), counts.tolist()):
        assert c == sum((p, x) in cites and (p, y) in cites for p in range(g.n))


@given(digraphs(max_n=12, max_weight=7))
def test_serialization_round_trip(g):
    g = g.with_weights(g.weight / 3.0 + 0.1)
    assert loads_graph(dumps_graph(g)) == g


def test_round_trip_keeps_ids():
    g = compute_weights(load_graph("a\tb\nc\tb\nc\ta\n"))
    back = load_graph(dumps_graph(g), format="json")
    assert back == g and back.ids == ("a", "b", "c")


def test_degree_stats():
    path = WeightedDigraph.from_edges(3, [(0, 1), (1, 2)])
    assert degree_stats(path).out_degree_one == pytest.approx(2 / 3)
    star = WeightedDigraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    st_ = degree_stats(star)
    assert st_.out_degree_one == 0
    assert st_.sinks == 0.75 and st_.sources == 0.25


def test_subgraph_relabels():
    g = WeightedDigraph.from_edges(5, [(0, 4), (4, 2), (1, 3)], [1.0, 2.0, 3.0], ids="abcde")
    sub = g.subgraph([4, 0, 2])
    assert sub.ids == ("a", "c", "e")
    assert sub.edge_weights() == {(0, 2): 1.0, (2, 1): 2.0}
    assert np.array_equal(sub.out_degree, [1, 0, 1])
