"""Constructions that move separators and decompositions between a graph and its coarsenings.

* separator transfer into weighted (sigma = 3) and unweighted (sigma = 4) distance graphs;
* coarsening a tree-partition of a quasi-isometric host into a tree-partition of
  ``G`` with spread ``r``;
* lifting a tree decomposition of an unweighted distance graph back to ``G``.

Every construction checks its own postconditions and raises
:class:`InvariantViolation` when one fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .decomposition import (
    TreeDecomposition,
    TreePartition,
    _rooted,
    validate_tree_decomposition,
    validate_tree_partition,
)
from .distgraph import DistanceGraph, PhiMap
from .errors import DecompositionFailure, InputError, InvariantViolation
from .graph import INF, Ball, Graph, WeightedGraph, as_rational, mask_of, vertices_of
from .separator import SeparatorOracle, SeparatorWitness, WeightFn, exact_treewidth, is_balanced_separator


def _lift_weights(dg: DistanceGraph, mu_H: WeightFn) -> WeightFn:
    if len(mu_H) != dg.H.n:
        raise InputError(f"weight function has {len(mu_H)} entries, H has {dg.H.n} vertices")
    ws = [0] * dg.host.n
    for i, v in enumerate(dg.I):
        ws[v] = mu_H.weights[i]
    return WeightFn(tuple(ws))


def _oracle_answer(G, mu_G, k, r, oracle):
    if oracle is None:
        oracle = SeparatorOracle(G, k, r)
    elif oracle.graph is not G or oracle.k != k or oracle.r != r:
        raise InputError("oracle was built for a different graph, k or r")
    w = oracle(mu_G)
    if w is None:
        raise DecompositionFailure(f"no ({k},{r})-coverable balanced separator in G for the lifted weights")
    return w


@dataclass(frozen=True)
class WeightedTransfer:
    """``vertices`` are H indices; ``anchors`` the chosen ``v_i`` (H indices)."""

    vertices: tuple[int, ...]
    anchors: tuple[int, ...]
    source: SeparatorWitness
    size_bound: int | None


def separator_transfer_weighted(G: Graph, dg: DistanceGraph, phi: PhiMap, mu_H: WeightFn, k: int, *, m_estimate: int | None = None, oracle: SeparatorOracle | None = None) -> WeightedTransfer:
    """Balanced separator of ``H`` from one of ``G``: ``X_H = U N_H^2[v_i]``.

    ``v_i`` is the member of I nearest to the i-th ball centre (lowest id on
    ties), which is exactly ``phi`` of that centre.
    """
    if not dg.weighted or dg.sigma != 3:
        raise InputError("weighted transfer needs a weighted distance graph with sigma = 3")
    mu_G = _lift_weights(dg, mu_H)
    w = _oracle_answer(G, mu_G, k, dg.r, oracle)
    anchors = tuple(sorted({dg.to_h(phi[c]) for c in w.centers}))
    hops = dg.H.unweighted()
    X = 0
    for v in anchors:
        X |= hops.ball_mask(v, 2)
    X_H = tuple(vertices_of(X))
    if not is_balanced_separator(dg.H, mu_H, X_H):
        raise InvariantViolation("transferred separator is not balanced in H", witness=X_H)
    bound = None
    if m_estimate is not None:
        bound = k * 2 ** (6 * m_estimate)
        if len(X_H) > bound:
            raise InvariantViolation(f"transferred separator has {len(X_H)} vertices, above k*2**(6m) = {bound}", witness=X_H)
    return WeightedTransfer(X_H, anchors, w, bound)


def separator_transfer_unweighted(G: Graph, dg: DistanceGraph, phi: PhiMap, mu_H: WeightFn, d: int, *, oracle: SeparatorOracle | None = None) -> SeparatorWitness:
    """A (d, 1)-coverable balanced separator of ``H``: radius-1 balls around ``phi`` of the G-centres."""
    if dg.weighted or dg.sigma != 4:
        raise InputError("unweighted transfer needs an unweighted distance graph with sigma = 4")
    mu_G = _lift_weights(dg, mu_H)
    w = _oracle_answer(G, mu_G, d, dg.r, oracle)
    Y = sorted({dg.to_h(phi[c]) for c in w.centers})
    balls = tuple(Ball(y, 1) for y in Y)
    union = 0
    for b in balls:
        union |= dg.H.ball_mask(b.center, 1)
    witness = SeparatorWitness(balls, tuple(vertices_of(union)), mu_H)
    if len(balls) > d:
        raise InvariantViolation(f"{len(balls)} balls exceed d = {d}", witness=Y)
    if not is_balanced_separator(dg.H, mu_H, witness.union):
        raise InvariantViolation("transferred separator is not balanced in H", witness=Y)
    return witness


@dataclass(frozen=True)
class TreewidthBound:
    treewidth: int | None
    bound: int
    ok: bool | None


def check_treewidth_bound(dg: DistanceGraph, k: int, m_estimate: int, limit: int = 12) -> TreewidthBound:
    """``tw(H) <= 3k * 2**(6m)``; ``ok`` is ``None`` when H is too large to check exactly."""
    bound = 3 * k * 2 ** (6 * m_estimate)
    if dg.H.n > limit:
        return TreewidthBound(None, bound, None)
    hops = dg.H if isinstance(dg.H, Graph) else dg.H.unweighted()
    tw = exact_treewidth(hops, limit=limit)
    return TreewidthBound(tw, bound, tw <= bound)


# ---------------------------------------------------------------------------
# coarsening


@dataclass(frozen=True)
class CoarseningParams:
    alpha: object
    beta: object
    gamma: object
    r: int

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.alpha < 1 or self.beta < 1:
            raise InputError("alpha and beta must be at least 1")
        if self.gamma <= 0:
            raise InputError("gamma must be positive")
        if not isinstance(self.r, int) or self.r < 1:
            raise InputError(f"r must be a positive integer, got {self.r!r}")

    @property
    def p(self) -> int:
        return math.ceil(Fraction(self.alpha + self.beta) / self.gamma)


@dataclass(frozen=True)
class LevelClusters:
    """Level nodes ``L`` (depth divisible by p), their clusters, and the coarse tree over L."""

    root: int
    p: int
    depth: tuple[int, ...]
    L: tuple[int, ...]
    clusters: dict
    coarse_edges: tuple[tuple[int, int], ...]


def level_clusters(num_nodes: int, tree_edges, p: int, root: int = 0, *, reading: str = "descendant") -> LevelClusters:
    """Group tree nodes into clusters hanging below every p-th level.

    ``C_root`` holds the nodes at depth below ``2p``. For any other level node
    ``y``, ``C_y`` holds the descendants ``x`` of ``y`` with
    ``p <= depth(x) - depth(y) < 2p``. The ``"verbatim"`` reading drops the
    descendant requirement (only ``depth(x) > depth(y)`` and the distance
    window); on branching trees it makes clusters overlap, which is reported as
    an :class:`InvariantViolation`. Coarse edges join each non-root level node
    to its ancestor ``p`` levels up.
    """
    if p < 1:
        raise InputError("p must be positive")
    if reading not in ("descendant", "verbatim"):
        raise InputError(f"unknown reading {reading!r}")
    _, parent, depth, order = _rooted(num_nodes, tree_edges, root)
    L = tuple(sorted(y for y in range(num_nodes) if depth[y] % p == 0))
    clusters = {y: [] for y in L}
    if reading == "descendant":
        for x in range(num_nodes):
            if depth[x] < 2 * p:
                clusters[root].append(x)
                continue
            y = x
            for _ in range(depth[x] - p * (depth[x] // p - 1)):
                y = parent[y]
            clusters[y].append(x)
    else:
        dist = _tree_distances(num_nodes, tree_edges)
        owner = {}
        for y in L:
            for x in range(num_nodes):
                if y == root:
                    inside = depth[x] < 2 * p
                else:
                    inside = p <= dist[x][y] < 2 * p and depth[x] > depth[y]
                if inside:
                    if x in owner:
                        raise InvariantViolation(
                            f"clusters are not a partition: node {x} lies in the clusters of {owner[x]} and {y}",
                            witness=(x, owner[x], y),
                        )
                    owner[x] = y
                    clusters[y].append(x)
        missing = [x for x in range(num_nodes) if x not in owner]
        if missing:
            raise InvariantViolation(f"clusters are not a partition: node {missing[0]} is in none", witness=missing[0])
    edges = []
    for y in L:
        if y == root:
            continue
        a = y
        for _ in range(p):
            a = parent[a]
        edges.append((a, y))
    return LevelClusters(root, p, tuple(depth), L, {y: tuple(c) for y, c in clusters.items()}, tuple(sorted(edges)))


def _tree_distances(num_nodes, tree_edges):
    g = Graph(num_nodes, tree_edges)
    return [g.distances_from(x) for x in range(num_nodes)]


def _check_cluster_partition(lc: LevelClusters, num_nodes: int):
    seen = {}
    for y, C in lc.clusters.items():
        for x in C:
            if x in seen:
                raise InvariantViolation(f"node {x} lies in clusters {seen[x]} and {y}", witness=x)
            seen[x] = y
    if len(seen) != num_nodes:
        missing = next(x for x in range(num_nodes) if x not in seen)
        raise InvariantViolation(f"node {missing} lies in no cluster", witness=missing)


def far_pairs_violations(lc: LevelClusters, num_nodes: int, tree_edges) -> list:
    """Node pairs in distinct, non-adjacent clusters at tree distance ``<= p``."""
    dist = _tree_distances(num_nodes, tree_edges)
    owner = {x: y for y, C in lc.clusters.items() for x in C}
    adjacent = set(lc.coarse_edges) | {(b, a) for a, b in lc.coarse_edges}
    bad = []
    for x in range(num_nodes):
        for x2 in range(x + 1, num_nodes):
            y, y2 = owner[x], owner[x2]
            if y != y2 and (y, y2) not in adjacent and dist[x][x2] <= lc.p:
                bad.append((x, x2))
    return bad


def check_map_quasi_isometry(G: Graph, H, phi: Sequence[int], alpha, beta):
    """Exhaustive check that ``phi`` is an ``(alpha, beta)``-quasi-isometry; returns the density gap."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if len(phi) != G.n:
        raise InputError("phi must map every vertex of G")
    for u in range(G.n):
        rg = G.distances_from(u)
        rh = H.distances_from(phi[u])
        for v in range(u + 1, G.n):
            a, b = rg[v], rh[phi[v]]
            if a is INF or b is INF:
                if (a is INF) != (b is INF):
                    raise InvariantViolation(f"pair ({u}, {v}): reachability differs between G and H", witness=(u, v))
                continue
            if not Fraction(a) / alpha - beta <= b <= alpha * a + beta:
                raise InvariantViolation(
                    f"phi is not an ({alpha}, {beta})-quasi-isometry at pair ({u}, {v}): d_G={a}, d_H={b}", witness=(u, v)
                )
    images = sorted(set(phi))
    gap = 0
    for w in range(H.n):
        row = H.distances_from(w)
        gap = max(gap, min(row[x] for x in images))
    if gap > beta:
        raise InvariantViolation(f"image of phi is not {beta}-dense (gap {gap})", witness=gap)
    return gap


@dataclass(frozen=True)
class CoarseningResult:
    partition: TreePartition
    clusters: LevelClusters
    tree_max_degree: int
    coarse_max_degree: int
    degree_bound: int
    cluster_bound: int
    largest_cluster: int
    assumed_degree: int
    fibre_diameter: object


def coarsen_tree_partition(G: Graph, H, phi: Sequence[int], tp_H: TreePartition, params: CoarseningParams, *, reading: str = "descendant") -> CoarseningResult:
    """Tree-partition of ``G`` with spread ``r`` from a tree-partition of a quasi-isometric ``H``.

    ``phi`` maps G-vertices to H-vertices and must be an
    ``(alpha, beta*r)``-quasi-isometry; every H-edge must weigh at least
    ``gamma*r`` (an unweighted ``H`` counts every edge as 1). Bags of ``H`` are
    pulled back through ``phi``, the tree is rooted at node 0 and grouped into
    :func:`level_clusters`, and each coarse bag is covered by one ball of
    radius ``alpha*beta*r`` per non-empty fibre, centred at its lowest vertex.
    """
    r = params.r
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    if isinstance(H, WeightedGraph):
        light = [(u, v, w) for u, v, w in H.edges() if w < gamma * r]
        hops = H.unweighted()
    else:
        light = [(u, v, 1) for u, v in H.edges()] if 1 < gamma * r else []
        hops = H
    if light:
        raise InputError(f"H edge {light[0][:2]} weighs {light[0][2]} < gamma*r = {gamma * r}")
    for x in phi:
        if not (isinstance(x, int) and 0 <= x < H.n):
            raise InputError(f"phi maps into invalid H vertex {x!r}")
    problems = validate_tree_partition(hops, TreePartition(tp_H.bags, tp_H.tree_edges, spread=1))
    if problems:
        raise InputError(f"tp_H is not a tree-partition of H: {problems[0].message}")
    check_map_quasi_isometry(G, H, phi, alpha, beta * r)

    N = tp_H.num_nodes
    where = [0] * H.n
    for x, bag in enumerate(tp_H.bags):
        for v in bag:
            where[v] = x
    pulled = [[] for _ in range(N)]
    fibres = [[] for _ in range(H.n)]
    for u in range(G.n):
        pulled[where[phi[u]]].append(u)
        fibres[phi[u]].append(u)
    fibre_diam = 0
    for fib in fibres:
        for i, u in enumerate(fib):
            row = G.distances_from(u)
            for v in fib[i + 1:]:
                fibre_diam = max(fibre_diam, row[v])
    if fibre_diam > alpha * beta * r:
        raise InvariantViolation(f"a fibre of phi has diameter {fibre_diam} > alpha*beta*r", witness=fibre_diam)

    p = params.p
    lc = level_clusters(N, tp_H.tree_edges, p, 0, reading=reading)
    _check_cluster_partition(lc, N)
    far = far_pairs_violations(lc, N, tp_H.tree_edges)
    if far:
        raise InvariantViolation(f"nodes {far[0]} in non-adjacent clusters are within distance {p}", witness=far)

    index = {y: i for i, y in enumerate(lc.L)}
    radius = alpha * beta * r
    bags, covers = [], []
    for y in lc.L:
        members = sorted(u for x in lc.clusters[y] for u in pulled[x])
        hv = sorted({v for x in lc.clusters[y] for v in tp_H.bags[x] if fibres[v]})
        bags.append(tuple(members))
        covers.append(tuple(Ball(fibres[v][0], radius) for v in hv))
    edges = [(index[a], index[b]) for a, b in lc.coarse_edges]
    tp = TreePartition(bags, edges, covers, spread=r)
    problems = validate_tree_partition(G, tp)
    if problems:
        raise InvariantViolation(f"coarsened partition is invalid: {problems[0].message}", witness=problems)

    tdeg = [0] * N
    for a, b in tp_H.tree_edges:
        tdeg[a] += 1
        tdeg[b] += 1
    D = max(tdeg, default=0)
    cdeg = [0] * len(lc.L)
    for a, b in edges:
        cdeg[a] += 1
        cdeg[b] += 1
    degree_bound = 1 + D**p
    cluster_bound = sum(D**i for i in range(2 * p))
    largest = max(len(c) for c in lc.clusters.values())
    if max(cdeg, default=0) > degree_bound:
        raise InvariantViolation(f"coarse tree degree {max(cdeg)} exceeds 1 + D**p = {degree_bound}")
    if largest > cluster_bound:
        raise InvariantViolation(f"cluster of {largest} nodes exceeds {cluster_bound}")
    width = max((len(b) for b in tp_H.bags), default=0)
    return CoarseningResult(
        tp, lc, D, max(cdeg, default=0), degree_bound, cluster_bound, largest, width * hops.max_degree(), fibre_diam
    )


# ---------------------------------------------------------------------------
# lifting


def lift_decomposition(G: Graph, dg: DistanceGraph, phi: PhiMap, td_H: TreeDecomposition, s=None) -> TreeDecomposition:
    """Pull a tree decomposition of an unweighted distance graph back to ``G``.

    Each bag becomes ``{u : phi(u) in bag}``; each cover keeps its centres
    (translated to host ids) with radius ``(4s + 1) r``, where ``s`` defaults
    to the largest cover radius of ``td_H``.
    """
    if dg.weighted or dg.sigma != 4:
        raise InputError("lifting needs an unweighted distance graph with sigma = 4")
    problems = validate_tree_decomposition(dg.H, td_H)
    if problems:
        raise InputError(f"td_H is not a valid tree decomposition of H: {problems[0].message}")
    if td_H.covers is None:
        raise InputError("td_H needs per-bag covers")
    top = max((b.radius for c in td_H.covers for b in c), default=0)
    if s is None:
        s = top
    s = as_rational(s)
    if top > s:
        raise InputError(f"td_H uses cover radius {top} > s = {s}")
    ph = phi.h_indices(dg)
    fibre = [0] * dg.H.n
    for u, x in enumerate(ph):
        fibre[x] |= 1 << u
    radius = (4 * s + 1) * dg.r
    bags, covers = [], []
    for bag, cover in zip(td_H.bags, td_H.covers):
        m = 0
        for x in bag:
            m |= fibre[x]
        bags.append(tuple(vertices_of(m)))
        covers.append(tuple(sorted({Ball(dg.to_host(b.center), radius) for b in cover})))
    td = TreeDecomposition(bags, td_H.tree_edges, covers)
    problems = validate_tree_decomposition(G, td)
    if problems:
        raise InvariantViolation(f"lifted decomposition is invalid: {problems[0].message}", witness=problems)
    return td
