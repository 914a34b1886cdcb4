from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import graphs
from coarsetw.errors import BudgetExceeded, InputError
from coarsetw.generators import cycle, path, path_universal
from coarsetw.graph import Graph
from coarsetw.separator import (
    SeparatorOracle,
    WeightFn,
    bsn_over_indicators,
    exact_treewidth,
    find_bad_indicator,
    find_separator,
    is_balanced_separator,
)

K4 = Graph(4, [(a, b) for a, b in combinations(range(4), 2)])


def test_weight_fn_total_and_validation():
    mu = WeightFn(("1/2", 2, 0))
    assert mu.total == Fraction(5, 2)
    assert mu.indicator_mask is None
    assert WeightFn.indicator(4, [1, 3]).indicator_mask == 0b1010
    with pytest.raises(InputError):
        WeightFn((1, -1))
    with pytest.raises(InputError):
        WeightFn.indicator(3, [3])


def test_balanced_examples():
    P5 = path(5)
    assert is_balanced_separator(P5, WeightFn.uniform(5), [2])
    assert not is_balanced_separator(P5, WeightFn.uniform(5), [0])
    assert is_balanced_separator(P5, WeightFn.zeros(5), [])


def test_balance_is_exact_rational():
    # 1/3 + 1/3 + 1/3 split as {1/3} | {1/3, 1/3}: heavier side 2/3 > 1/2
    G = path(4)
    mu = WeightFn(("1/3", "1/3", 0, "1/3"))
    assert not is_balanced_separator(G, mu, [2])
    assert is_balanced_separator(G, mu, [1])


def test_find_separator_examples():
    w = find_separator(path(9), WeightFn.uniform(9), 1, 1)
    assert w.centers == [3]
    assert list(w.union) == [2, 3, 4]
    assert find_separator(K4, WeightFn.uniform(4), 1, 1).centers == [0]
    assert find_separator(cycle(16), WeightFn.uniform(16), 1, 1) is None


def test_zero_weight_gives_empty_witness():
    w = find_separator(path(6), WeightFn.zeros(6), 2, 1)
    assert w.balls == () and w.union == ()


def test_oracle_budget():
    with pytest.raises(BudgetExceeded):
        SeparatorOracle(path(60), 4, 1, budget=100)


def test_greedy_oracle_returns_balanced_or_none():
    G = cycle(16)
    w = find_separator(G, WeightFn.uniform(16), 2, 1, mode="greedy")
    assert w is not None and len(w.balls) <= 2
    assert is_balanced_separator(G, WeightFn.uniform(16), w.union)


@settings(max_examples=80)
@given(graphs(max_n=9), st.integers(1, 2), st.integers(0, 2), st.data())
def test_exact_oracle_matches_brute_force(g, k, r, data):
    n, edges = g
    G = Graph(n, edges)
    weights = data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    mu = WeightFn(tuple(weights))
    w = find_separator(G, mu, k, r)
    d = oracles.apsp(n, edges)
    assert (w is not None) == oracles.separable(n, edges, d, weights, k, r)
    if w is not None:
        assert len(w.balls) <= k and all(b.radius == r for b in w.balls)
        assert set(w.union) == set().union(*(oracles.ball(d, b.center, r) for b in w.balls)) if w.balls else not w.union
        assert oracles.is_balanced(n, edges, weights, set(w.union))


@settings(max_examples=40)
@given(graphs(max_n=8), st.integers(1, 2), st.data())
def test_separator_monotone_in_k_and_r(g, r, data):
    n, edges = g
    G = Graph(n, edges)
    mu = WeightFn(tuple(data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))))
    if find_separator(G, mu, 1, r) is not None:
        assert find_separator(G, mu, 2, r) is not None
        assert find_separator(G, mu, 1, r + 1) is not None


# --- bsn over indicator weights ------------------------------------------


def test_bsn_examples():
    assert bsn_over_indicators(path(5), 1, 4) == 1
    assert bsn_over_indicators(cycle(16), 1, 4) == 2
    assert bsn_over_indicators(K4, 1, 4) == 1


def test_bsn_returns_none_when_k_max_too_small():
    assert bsn_over_indicators(cycle(16), 1, 1) is None


def test_bsn_enumeration_limit():
    with pytest.raises(BudgetExceeded):
        bsn_over_indicators(path(25), 1, 2)


@pytest.mark.parametrize("G", [path(12), cycle(14), path_universal(8)], ids=["P12", "C14", "PU8"])
@pytest.mark.parametrize("r", [0, 1, 2])
def test_milp_and_enumeration_agree(G, r):
    a = bsn_over_indicators(G, r, 5, method="enumerate")
    b = bsn_over_indicators(G, r, 5, method="milp")
    assert a == b


def test_bad_indicator_is_a_real_counterexample():
    G = cycle(16)
    A = find_bad_indicator(G, 1, 1, method="milp")
    assert A is not None
    assert find_separator(G, WeightFn.indicator(16, A), 1, 1) is None


@settings(max_examples=25)
@given(graphs(max_n=6), st.integers(0, 1))
def test_bsn_matches_brute_force(g, r):
    n, edges = g
    assert bsn_over_indicators(Graph(n, edges), r, 4) == oracles.bsn_indicators(n, edges, r, 4)


# --- exact treewidth ------------------------------------------------------


def test_treewidth_examples():
    assert exact_treewidth(path(5)) == 1
    assert exact_treewidth(K4) == 3
    assert exact_treewidth(cycle(5)) == 2


def test_treewidth_limit():
    with pytest.raises(BudgetExceeded):
        exact_treewidth(path(13))


@settings(max_examples=40)
@given(graphs(max_n=7))
def test_treewidth_matches_elimination_orders(g):
    n, edges = g
    assert exact_treewidth(Graph(n, edges)) == oracles.treewidth(n, edges)


def test_treewidth_agrees_with_networkx_upper_bound():
    for i, nxg in enumerate(nx.graph_atlas_g()[1:200]):
        G = Graph.from_networkx(nxg)
        tw = exact_treewidth(G)
        ub, _ = nx.algorithms.approximation.treewidth_min_fill_in(nxg)
        assert tw <= ub
