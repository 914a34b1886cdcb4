"""Text and JSON serialization for graphs, weights, distance graphs and decompositions.

Rationals are written as ints when integral and as ``"num/den"`` strings
otherwise, so round trips are exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .decomposition import TreeDecomposition, TreePartition
from .distgraph import DistanceGraph, PhiMap
from .errors import InputError
from .graph import Ball, Graph, WeightedGraph, as_rational
from .separator import WeightFn


def rational_out(q):
    q = as_rational(q)
    if isinstance(q, Fraction):
        return f"{q.numerator}/{q.denominator}"
    return q


# ---------------------------------------------------------------------------
# graphs


def graph_to_text(g) -> str:
    lines = [f"p {g.n} {g.m}"]
    if isinstance(g, WeightedGraph):
        lines += [f"e {u} {v} {Fraction(w).numerator}/{Fraction(w).denominator}" for u, v, w in g.edges()]
    else:
        lines += [f"e {u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str):
    header = None
    edges = []
    weighted = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None or len(parts) != 3:
                raise InputError(f"line {lineno}: malformed header")
            header = (int(parts[1]), int(parts[2]))
        elif parts[0] == "e":
            if header is None:
                raise InputError(f"line {lineno}: edge before header")
            if len(parts) not in (3, 4):
                raise InputError(f"line {lineno}: malformed edge")
            w = len(parts) == 4
            if weighted is None:
                weighted = w
            elif weighted != w:
                raise InputError(f"line {lineno}: mixes weighted and unweighted edges")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise InputError(f"line {lineno}: vertex ids must be integers") from None
            edges.append((u, v, as_rational(parts[3])) if w else (u, v))
        else:
            raise InputError(f"line {lineno}: unknown record {parts[0]!r}")
    if header is None:
        raise InputError("missing 'p <n> <m>' header")
    n, m = header
    if len(edges) != m:
        raise InputError(f"header declares {m} edges, found {len(edges)}")
    return WeightedGraph(n, edges) if weighted else Graph(n, edges)


def graph_to_json(g) -> dict:
    if isinstance(g, WeightedGraph):
        return {"n": g.n, "edges": [[u, v, rational_out(w)] for u, v, w in g.edges()]}
    return {"n": g.n, "edges": [[u, v] for u, v in g.edges()]}


def graph_from_json(obj):
    try:
        n, edges = obj["n"], obj["edges"]
    except (KeyError, TypeError):
        raise InputError("graph JSON needs fields 'n' and 'edges'") from None
    if any(len(e) == 3 for e in edges):
        return WeightedGraph(n, [tuple(e) for e in edges])
    return Graph(n, [tuple(e) for e in edges])


# ---------------------------------------------------------------------------
# weights


def weights_to_json(mu: WeightFn) -> dict:
    return {"weights": [str(rational_out(w)) for w in mu.weights]}


def weights_from_json(obj) -> WeightFn:
    try:
        return WeightFn(tuple(obj["weights"]))
    except (KeyError, TypeError):
        raise InputError("weight JSON needs a 'weights' list") from None


def parse_mu(spec: str, n: int) -> WeightFn:
    """``uniform``, ``indicator:a,b,...`` or ``file:<path>``."""
    if spec == "uniform":
        return WeightFn.uniform(n)
    if spec.startswith("indicator:"):
        body = spec[len("indicator:"):].strip()
        try:
            vs = [int(x) for x in body.split(",") if x.strip()]
        except ValueError:
            raise InputError(f"bad indicator list {body!r}") from None
        return WeightFn.indicator(n, vs)
    if spec.startswith("file:"):
        mu = weights_from_json(read_json(spec[len("file:"):]))
        if len(mu) != n:
            raise InputError(f"weight file has {len(mu)} entries, graph has {n} vertices")
        return mu
    raise InputError(f"unknown --mu value {spec!r}; use uniform, indicator:<list> or file:<path>")


# ---------------------------------------------------------------------------
# balls and decompositions


def ball_to_json(b: Ball) -> dict:
    return {"center": b.center, "radius": rational_out(b.radius)}


def ball_from_json(obj) -> Ball:
    return Ball(obj["center"], as_rational(obj["radius"]))


def td_to_json(td: TreeDecomposition) -> dict:
    nodes = []
    for i, bag in enumerate(td.bags):
        node = {"id": i, "bag": list(bag)}
        if td.covers is not None:
            node["cover"] = [ball_to_json(b) for b in td.covers[i]]
        nodes.append(node)
    out = {"nodes": nodes, "tree_edges": [list(e) for e in td.tree_edges]}
    if isinstance(td, TreePartition):
        out["spread"] = rational_out(td.spread)
    return out


def td_from_json(obj) -> TreeDecomposition:
    try:
        nodes = sorted(obj["nodes"], key=lambda x: x["id"])
        edges = [tuple(e) for e in obj["tree_edges"]]
    except (KeyError, TypeError):
        raise InputError("decomposition JSON needs 'nodes' and 'tree_edges'") from None
    if [x["id"] for x in nodes] != list(range(len(nodes))):
        raise InputError("node ids must be 0..N-1")
    bags = [tuple(x["bag"]) for x in nodes]
    covers = None
    if nodes and all("cover" in x for x in nodes):
        covers = [tuple(ball_from_json(b) for b in x["cover"]) for x in nodes]
    if "spread" in obj:
        return TreePartition(bags, edges, covers, spread=as_rational(obj["spread"]))
    return TreeDecomposition(bags, edges, covers)


def distgraph_to_json(dg: DistanceGraph, phi: PhiMap) -> dict:
    return {
        "r": dg.r,
        "sigma": dg.sigma,
        "weighted": dg.weighted,
        "I": list(dg.I),
        "H": graph_to_json(dg.H),
        "phi": list(phi.phi),
    }


def distgraph_from_json(obj, host: Graph):
    """Rebuild ``(DistanceGraph, PhiMap)`` and check it against ``host``."""
    from .distgraph import build_distance_graph

    try:
        r, sigma, weighted, I = obj["r"], obj["sigma"], obj["weighted"], obj["I"]
        phi = obj["phi"]
    except (KeyError, TypeError):
        raise InputError("distance-graph JSON needs r, sigma, weighted, I, H and phi") from None
    dg, fresh = build_distance_graph(host, r, sigma, weighted, I)
    if graph_to_json(dg.H) != graph_to_json(graph_from_json(obj["H"])):
        raise InputError("stored H does not match the distance graph of the host")
    if len(phi) != host.n:
        raise InputError("phi must list one entry per host vertex")
    members = set(dg.I)
    for u, x in enumerate(phi):
        if x not in members or host.dist(u, x) > r:
            raise InputError(f"phi({u}) = {x} is not a member of I within distance {r}")
    return dg, PhiMap(tuple(phi))


# ---------------------------------------------------------------------------
# files


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def load_graph(path):
    """Graph from a ``.json`` file or the ``p``/``e`` text format."""
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {path}")
    text = p.read_text()
    if text.lstrip().startswith("{"):
        return graph_from_json(read_json(path))
    return graph_from_text(text)


def save_graph(path, g):
    if str(path).endswith(".json"):
        write_json(path, graph_to_json(g))
    else:
        Path(path).write_text(graph_to_text(g))
