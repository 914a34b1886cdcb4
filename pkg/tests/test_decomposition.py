import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import graphs
from coarsetw.builders import BuilderParams, decompose_simple
from coarsetw.decomposition import (
    TreeDecomposition,
    TreePartition,
    balanced_bag,
    bfs_layered_tree_partition,
    coverability_stats,
    potential,
    to_dot,
    tree_partition_to_tree_decomposition,
    validate_tree_decomposition,
    validate_tree_partition,
)
from coarsetw.errors import InputError
from coarsetw.generators import cycle, grid, path
from coarsetw.graph import Ball, Graph, WeightedGraph
from coarsetw.separator import WeightFn, is_balanced_separator


def axioms(problems):
    return {p.axiom for p in problems}


# --- validators -----------------------------------------------------------


def test_td_examples():
    P3 = path(3)
    assert validate_tree_decomposition(P3, TreeDecomposition([(0, 1), (1, 2)], [(0, 1)])) == []
    bad = validate_tree_decomposition(P3, TreeDecomposition([(0, 1), (2,)], [(0, 1)]))
    assert [(p.axiom, p.witness) for p in bad] == [("edge", (1, 2))]
    split = TreeDecomposition([(0, 1), (0,), (1, 2)], [(0, 1), (1, 2)])
    assert ("connectivity", 1) in [(p.axiom, p.witness) for p in validate_tree_decomposition(P3, split)]


def test_td_tree_shape_violations():
    P3 = path(3)
    cyc = TreeDecomposition([(0, 1), (1, 2), (1,)], [(0, 1), (1, 2), (2, 0)])
    assert "tree" in axioms(validate_tree_decomposition(P3, cyc))
    forest = TreeDecomposition([(0, 1), (1, 2), (2,)], [(0, 1)])
    assert "tree" in axioms(validate_tree_decomposition(P3, forest))


def test_td_missing_vertex_and_cover():
    G = Graph(3, [(0, 1)])
    td = TreeDecomposition([(0, 1)], [])
    assert ("vertex", 2) in [(p.axiom, p.witness) for p in validate_tree_decomposition(G, td)]
    td = TreeDecomposition([(0, 1, 2)], [], [(Ball(0, 1),)])
    assert "cover" in axioms(validate_tree_decomposition(G, td))


def test_tp_examples():
    P4 = path(4)
    assert validate_tree_partition(P4, TreePartition([(0, 1), (2, 3)], [(0, 1)], spread=1)) == []
    assert validate_tree_partition(P4, TreePartition([(0, 1), (2, 3)], [(0, 1)], spread=2)) == []
    C4 = cycle(4)
    bad = validate_tree_partition(C4, TreePartition([(0,), (1,), (2,), (3,)], [(0, 1), (1, 2), (2, 3)]))
    assert [(p.axiom, p.witness) for p in bad] == [("edge", (0, 3))]


def test_tp_spread_violation_and_partition():
    P5 = path(5)
    tp = TreePartition([(0, 1), (2,), (3, 4)], [(0, 1), (1, 2)], spread=3)
    assert ("spread", (0, 3)) in [(p.axiom, p.witness) for p in validate_tree_partition(P5, tp)]
    dup = TreePartition([(0, 1), (1, 2)], [(0, 1)])
    assert "partition" in axioms(validate_tree_partition(path(3), dup))


def _brute_spread_ok(n, edges, bags, tree_edges, s):
    d = oracles.apsp(n, edges)
    where = {v: x for x, b in enumerate(bags) for v in b}
    adj = set(map(tuple, tree_edges)) | {(b, a) for a, b in tree_edges}
    return all(
        where[u] == where[v] or (where[u], where[v]) in adj
        for u in range(n)
        for v in range(n)
        if d[u][v] <= s
    )


@given(graphs(max_n=9), st.integers(1, 3))
def test_bfs_layering_is_a_tree_partition(g, s):
    n, edges = g
    G = Graph(n, edges)
    tp = bfs_layered_tree_partition(G)
    assert validate_tree_partition(G, tp) == []
    tp.spread = s
    assert (validate_tree_partition(G, tp) == []) == _brute_spread_ok(n, edges, tp.bags, tp.tree_edges, s)


def test_bfs_layering_accepts_weighted_graph():
    H = WeightedGraph(4, [(0, 1, 6), (1, 2, 6), (2, 3, 6)])
    tp = bfs_layered_tree_partition(H)
    assert validate_tree_partition(H, tp) == []


# --- subdivision ----------------------------------------------------------


def test_subdivision_examples():
    tp = TreePartition([(0, 1), (2, 3)], [(0, 1)])
    td = tree_partition_to_tree_decomposition(tp, path(4))
    assert sorted(td.bags) == [(0, 1), (0, 1, 2, 3), (2, 3)]
    assert validate_tree_decomposition(path(4), td) == []
    single = tree_partition_to_tree_decomposition(TreePartition([(0, 1, 2)], []))
    assert single.bags == [(0, 1, 2)] and single.tree_edges == []


def test_subdivision_cover_union():
    covers = [(Ball(0, 1), Ball(1, 1)), (Ball(2, 1), Ball(3, 1), Ball(4, 1))]
    tp = TreePartition([(0, 1), (2, 3)], [(0, 1)], covers)
    td = tree_partition_to_tree_decomposition(tp)
    assert len(td.covers[2]) == 5


def test_subdivision_rejects_invalid():
    with pytest.raises(InputError):
        tree_partition_to_tree_decomposition(TreePartition([(0,), (1,)], [(0, 1)]), cycle(4))


@given(graphs(max_n=9))
def test_subdivision_of_valid_partition_is_valid(g):
    n, edges = g
    G = Graph(n, edges)
    td = tree_partition_to_tree_decomposition(bfs_layered_tree_partition(G), G)
    assert validate_tree_decomposition(G, td) == []


# --- balanced bag ---------------------------------------------------------


def test_balanced_bag_examples():
    P4 = path(4)
    td = TreeDecomposition([(0, 1), (1, 2), (2, 3)], [(0, 1), (1, 2)])
    assert balanced_bag(P4, td, WeightFn.uniform(4)) == 1
    single = TreeDecomposition([(0, 1, 2, 3)], [])
    assert balanced_bag(P4, single, WeightFn.uniform(4)) == 0
    x = balanced_bag(P4, td, WeightFn.indicator(4, [3]))
    assert 3 in td.bags[x]


def test_balanced_bag_rejects_invalid_td():
    with pytest.raises(InputError):
        balanced_bag(path(3), TreeDecomposition([(0, 1), (2,)], [(0, 1)]), WeightFn.uniform(3))


@given(graphs(max_n=10, connected=True), st.data())
def test_balanced_bag_always_balanced(g, data):
    n, edges = g
    G = Graph(n, edges)
    td = tree_partition_to_tree_decomposition(bfs_layered_tree_partition(G), G)
    ws = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    x = balanced_bag(G, td, WeightFn(tuple(ws)))
    assert oracles.is_balanced(n, edges, ws, set(td.bags[x]))


def test_balanced_bag_on_builder_output():
    rng = random.Random(7)
    G = grid(4, 4)
    td = decompose_simple(G, BuilderParams(2, 1))
    for _ in range(20):
        mu = WeightFn(tuple(rng.randint(0, 3) for _ in range(G.n)))
        assert is_balanced_separator(G, mu, td.bags[balanced_bag(G, td, mu)])


# --- coverability statistics ---------------------------------------------


def test_potential_of_r_and_2r():
    assert potential([Ball(0, 1), Ball(3, 2)], 1) == 6
    assert potential([Ball(0, 4), Ball(3, 8)], 4) == 6
    with pytest.raises(InputError):
        potential([Ball(0, 3)], 2)


def test_coverability_stats_examples():
    P5 = path(5)
    st_ = coverability_stats(P5, TreeDecomposition([tuple(range(5))], []), 2, 3)
    assert (st_.k_hat, st_.r_hat, st_.all_exact) == (1, 2, True)
    empty = coverability_stats(P5, TreeDecomposition([()], []), 1, 3)
    assert empty.per_bag[0].cover_size == 0


def test_coverability_stats_potential():
    td = TreeDecomposition([(0, 1, 2, 3, 4)], [], [(Ball(0, 1), Ball(3, 2))])
    s = coverability_stats(path(5), td, 1, 3)
    assert s.attached_potential == 6


def test_dot_output():
    dot = to_dot(TreeDecomposition([(0, 1), (1, 2)], [(0, 1)], [(Ball(0, 1),), (Ball(2, 1),)]))
    assert "n0 -- n1" in dot and "B(0,1)" in dot
