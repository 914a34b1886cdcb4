from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graphs
from coarsetw.builders import BuilderParams, decompose_simple
from coarsetw.decomposition import TreePartition
from coarsetw.distgraph import build_distance_graph
from coarsetw.errors import InputError
from coarsetw.formats import (
    distgraph_from_json,
    distgraph_to_json,
    graph_from_json,
    graph_from_text,
    graph_to_json,
    graph_to_text,
    load_graph,
    parse_mu,
    save_graph,
    td_from_json,
    td_to_json,
    weights_from_json,
    weights_to_json,
    write_json,
)
from coarsetw.generators import cycle, path
from coarsetw.graph import Ball, Graph, WeightedGraph
from coarsetw.separator import WeightFn


def test_text_format():
    G = graph_from_text("# comment\np 3 2\ne 0 1\ne 1 2\n")
    assert (G.n, G.edges()) == (3, [(0, 1), (1, 2)])
    assert graph_to_text(path(3)) == "p 3 2\ne 0 1\ne 1 2\n"
    H = graph_from_text("p 2 1\ne 0 1 7/2\n")
    assert isinstance(H, WeightedGraph) and H.edges() == [(0, 1, Fraction(7, 2))]
    assert graph_to_text(H) == "p 2 1\ne 0 1 7/2\n"


@pytest.mark.parametrize(
    "text",
    ["e 0 1\n", "p 3 2\ne 0 1\n", "p 3 1\ne 0 x\n", "p 3 2\ne 0 1\ne 1 2 3\n", "p 2 0\nq\n", "p 2\n"],
)
def test_text_format_errors(text):
    with pytest.raises(InputError):
        graph_from_text(text)


@given(graphs(max_n=10))
def test_graph_round_trips(g):
    n, edges = g
    G = Graph(n, edges)
    assert graph_from_text(graph_to_text(G)).edges() == G.edges()
    assert graph_from_json(graph_to_json(G)).edges() == G.edges()


def test_weighted_json_round_trip():
    H = WeightedGraph(3, [(0, 1, Fraction(1, 3)), (1, 2, 4)])
    assert graph_to_json(H) == {"n": 3, "edges": [[0, 1, "1/3"], [1, 2, 4]]}
    assert graph_from_json(graph_to_json(H)).edges() == H.edges()


def test_weights_and_parse_mu(tmp_path):
    mu = WeightFn(("1/2", 0, 3))
    assert weights_from_json(weights_to_json(mu)).weights == mu.weights
    assert parse_mu("uniform", 3).weights == (1, 1, 1)
    assert parse_mu("indicator:0,2", 3).weights == (1, 0, 1)
    f = tmp_path / "w.json"
    write_json(f, weights_to_json(mu))
    assert parse_mu(f"file:{f}", 3).weights == mu.weights
    for bad in ("indicator:a", "indicator:5", "bogus", f"file:{f}x"):
        with pytest.raises(InputError):
            parse_mu(bad, 3)
    with pytest.raises(InputError):
        parse_mu(f"file:{f}", 4)


def test_decomposition_round_trips():
    G = cycle(8)
    td = decompose_simple(G, BuilderParams(2, 1))
    back = td_from_json(td_to_json(td))
    assert (back.bags, back.tree_edges, back.covers) == (td.bags, td.tree_edges, td.covers)
    tp = TreePartition([(0, 1), (2,)], [(0, 1)], [(Ball(0, Fraction(3, 2)),), ()], spread=2)
    back = td_from_json(td_to_json(tp))
    assert isinstance(back, TreePartition) and back.spread == 2 and back.covers == tp.covers


def test_decomposition_json_errors():
    with pytest.raises(InputError):
        td_from_json({"nodes": [{"id": 1, "bag": []}], "tree_edges": []})
    with pytest.raises(InputError):
        td_from_json({"nodes": []})


def test_distgraph_round_trip_and_tamper():
    G = cycle(12)
    dg, phi = build_distance_graph(G, 2)
    obj = distgraph_to_json(dg, phi)
    dg2, phi2 = distgraph_from_json(obj, G)
    assert dg2.I == dg.I and phi2.phi == phi.phi
    bad = dict(obj, phi=[0] * 12)
    with pytest.raises(InputError):
        distgraph_from_json(bad, G)
    bad = dict(obj, H={"n": 4, "edges": []})
    with pytest.raises(InputError):
        distgraph_from_json(bad, G)


def test_load_and_save(tmp_path):
    G = path(5)
    for name in ("g.json", "g.txt"):
        save_graph(tmp_path / name, G)
        assert load_graph(tmp_path / name).edges() == G.edges()
    with pytest.raises(InputError):
        load_graph(tmp_path / "missing")
    (tmp_path / "bad.json").write_text("{oops")
    with pytest.raises(InputError):
        load_graph(tmp_path / "bad.json")
