import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from coarsetw.builders import (
    BuilderParams,
    RoundBuilder,
    SimpleBuilder,
    crowded_pairs,
    crowding_alpha,
    decompose_round,
    decompose_simple,
    gamma_bound,
    round_bounds,
    simple_bounds,
    uncrowd,
)
from coarsetw.decomposition import is_round, potential, validate_tree_decomposition
from coarsetw.errors import CapExceeded, DecompositionFailure, InputError
from coarsetw.generators import cycle, grid, path, random_geometric
from coarsetw.graph import Ball, Graph
from coarsetw.separator import bsn_over_indicators


def all_ok(checks):
    return all(c.ok for c in checks), [c for c in checks if not c.ok]


# --- constants ------------------------------------------------------------


@pytest.mark.parametrize("k, alpha", [(1, 3), (2, 4), (3, 5), (4, 5), (5, 6), (8, 6)])
def test_alpha(k, alpha):
    assert crowding_alpha(k) == alpha
    assert crowding_alpha(k) == 2 + math.ceil(math.log2(2 * k))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 7, 16])
def test_gamma(k):
    assert gamma_bound(k) == math.floor(2000 * k * k * math.log2(k))


def test_params_defaults():
    p = BuilderParams(2, 3)
    assert (p.alpha, p.gamma_cap) == (4, 8000)
    with pytest.raises(InputError):
        BuilderParams(0, 1)
    with pytest.raises(InputError):
        BuilderParams(1, 0)


# --- simple builder -------------------------------------------------------


def test_simple_single_vertex():
    td = decompose_simple(Graph(1), BuilderParams(1, 2))
    assert td.bags == [(0,)] and td.covers == [(Ball(0, 2),)]


def test_simple_p8():
    G = path(8)
    td = decompose_simple(G, BuilderParams(1, 1))
    ok, bad = all_ok(simple_bounds(G, td, 1, 1))
    assert ok, bad
    assert max(len(c) for c in td.covers) <= 5


def test_simple_c16():
    G = cycle(16)
    td = decompose_simple(G, BuilderParams(2, 1))
    ok, bad = all_ok(simple_bounds(G, td, 2, 1))
    assert ok, bad
    assert max(len(c) for c in td.covers) <= 12


def test_simple_reports_failing_frame():
    with pytest.raises(DecompositionFailure) as e:
        decompose_simple(cycle(16), BuilderParams(1, 1))
    assert e.value.frame["depth"] == 0 and len(e.value.frame["U"]) == 16


def test_disconnected_and_empty_graphs():
    G = Graph(7, [(0, 1), (1, 2), (4, 5)])
    td = decompose_simple(G, BuilderParams(1, 1))
    assert validate_tree_decomposition(G, td) == []
    td = decompose_round(G, BuilderParams(2, 1))
    assert validate_tree_decomposition(G, td) == []
    assert decompose_simple(Graph(0), BuilderParams(1, 1)).bags == [()]


def test_recursion_depth_is_logarithmic():
    G = path(64)
    b = SimpleBuilder(G, BuilderParams(1, 1))
    b.run()
    assert b.stats.max_depth <= math.ceil(math.log2(64)) + 1


def test_builders_are_deterministic():
    G = grid(4, 4)
    a = decompose_round(G, BuilderParams(2, 1))
    b = decompose_round(G, BuilderParams(2, 1))
    assert (a.bags, a.tree_edges, a.covers) == (b.bags, b.tree_edges, b.covers)


# --- uncrowding -----------------------------------------------------------


def test_uncrowd_merges_sixteen_balls():
    G = path(40)
    p = BuilderParams(2, 1)
    B = [Ball(20, 1)] * 16
    out = uncrowd(G, B, p)
    assert potential(B, 1) == 32
    assert len(out) == 1 and out[0].radius == 5
    assert potential(out, 1) == 32
    assert G.ball_mask(20, 1) & ~G.ball_mask(out[0].center, 5) == 0


def test_uncrowd_prunes_only():
    G = path(10)
    p = BuilderParams(2, 1)
    assert uncrowd(G, [Ball(2, 1), Ball(7, 1)], p) == [Ball(2, 1), Ball(7, 1)]
    assert uncrowd(G, [Ball(2, 1), Ball(2, 1)], p) == [Ball(2, 1)]
    # Ball(0, 2) = {0,1,2} is inside Ball(1, 2) = {0,1,2,3}
    assert uncrowd(G, [Ball(0, 2), Ball(1, 2)], p) == [Ball(1, 2)]


def test_uncrowd_rejects_non_round():
    with pytest.raises(InputError):
        uncrowd(path(4), [Ball(0, 0)], BuilderParams(2, 1))


@st.composite
def round_sets(draw):
    n, edges = draw(graphs(min_n=1, max_n=14))
    r = draw(st.integers(1, 2))
    balls = draw(
        st.lists(st.builds(Ball, st.integers(0, n - 1), st.integers(1, 3).map(lambda q: q * r)), max_size=40)
    )
    return Graph(n, edges), r, balls


@settings(max_examples=60)
@given(round_sets(), st.integers(1, 2))
def test_uncrowd_postconditions(data, k):
    G, r, B = data
    p = BuilderParams(k, r)
    out = uncrowd(G, B, p)
    assert is_round(out, r)
    assert len(out) <= len(B)
    assert potential(out, r) <= potential(B, r)
    before = 0
    for b in B:
        before |= G.ball_mask(b.center, b.radius)
    after = 0
    for b in out:
        after |= G.ball_mask(b.center, b.radius)
    assert before & ~after == 0
    assert crowded_pairs(G, out, p) == []
    masks = [G.ball_mask(b.center, b.radius) for b in out]
    for i in range(len(out)):
        for j in range(len(out)):
            if i != j:
                assert masks[i] & ~masks[j] != 0


# --- round builder --------------------------------------------------------


def test_round_single_vertex():
    td = decompose_round(Graph(1), BuilderParams(2, 1))
    assert td.bags == [(0,)] and td.covers == [(Ball(0, 1),)]
    assert potential(td.covers[0], 1) == 2


@pytest.mark.parametrize("G", [cycle(16), grid(4, 4)], ids=["C16", "grid4x4"])
def test_round_bounds_k2(G):
    td = decompose_round(G, BuilderParams(2, 1))
    checks = round_bounds(G, td, 2, 1)
    ok, bad = all_ok(checks)
    assert ok, bad
    assert max(potential(c, 1) for c in td.covers) <= 40
    assert max(b.radius for c in td.covers for b in c) <= 6


def test_round_needs_k2_with_default_cap():
    with pytest.raises(InputError):
        decompose_round(path(4), BuilderParams(1, 1))
    td = decompose_round(path(4), BuilderParams(1, 1, gamma_cap=10))
    assert validate_tree_decomposition(path(4), td) == []


def test_round_cap_exceeded_carries_frame():
    with pytest.raises(CapExceeded) as e:
        decompose_round(cycle(16), BuilderParams(2, 1, gamma_cap=1))
    assert "W" in e.value.frame


def test_round_small_cap_stress():
    G = path(64)
    b = RoundBuilder(G, BuilderParams(2, 1, gamma_cap=32))
    td = b.run()
    assert validate_tree_decomposition(G, td) == []
    assert max(len(c) for c in td.covers) <= 32 + 4


@settings(max_examples=20)
@given(graphs(min_n=2, max_n=10, connected=True), st.integers(1, 2))
def test_builders_meet_bounds_at_bsn(g, r):
    n, edges = g
    G = Graph(n, edges)
    k = bsn_over_indicators(G, r, 4)
    td = decompose_simple(G, BuilderParams(k, r))
    ok, bad = all_ok(simple_bounds(G, td, k, r))
    assert ok, bad
    k2 = max(k, 2)
    td = decompose_round(G, BuilderParams(k2, r))
    ok, bad = all_ok(round_bounds(G, td, k2, r))
    assert ok, bad


def test_random_geometric_round():
    G = random_geometric(30, 1, threshold=2)
    k = max(bsn_over_indicators(G, 1, 4, method="auto"), 2)
    td = decompose_round(G, BuilderParams(k, 1))
    assert all_ok(round_bounds(G, td, k, 1))[0]
