"""Tree decompositions and tree-partitions: validation, conversion, balanced bags."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InputError, InvariantViolation
from .graph import (
    Ball,
    Cover,
    Graph,
    WeightedGraph,
    as_rational,
    component_masks,
    mask_of,
    minimum_cover,
    vertices_of,
)
from .separator import WeightFn, is_balanced_separator


@dataclass
class TreeDecomposition:
    """Node ``i`` has bag ``bags[i]``; ``covers[i]`` optionally certifies it."""

    bags: list[tuple[int, ...]]
    tree_edges: list[tuple[int, int]]
    covers: list[tuple[Ball, ...]] | None = None

    def __post_init__(self):
        self.bags = [tuple(sorted(set(b))) for b in self.bags]
        self.tree_edges = [tuple(e) for e in self.tree_edges]
        if self.covers is not None:
            self.covers = [tuple(c) for c in self.covers]
            if len(self.covers) != len(self.bags):
                raise InputError("covers must list one ball set per node")

    @property
    def num_nodes(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


@dataclass
class TreePartition(TreeDecomposition):
    spread: int = 1

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0)


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: object
    message: str


def _tree_violations(num_nodes: int, edges: Sequence[tuple[int, int]]) -> list[Violation]:
    out = []
    if num_nodes == 0:
        return [Violation("tree", None, "the tree has no nodes")]
    adj = [[] for _ in range(num_nodes)]
    seen_edges = set()
    for e in edges:
        a, b = e
        if not (0 <= a < num_nodes and 0 <= b < num_nodes):
            out.append(Violation("tree", e, f"tree edge {e} references a missing node"))
            continue
        if a == b:
            out.append(Violation("tree", e, f"tree edge {e} is a loop"))
            continue
        key = (min(a, b), max(a, b))
        if key in seen_edges:
            out.append(Violation("tree", e, f"tree edge {e} is repeated"))
            continue
        seen_edges.add(key)
        adj[a].append(b)
        adj[b].append(a)
    if out:
        return out
    if len(seen_edges) != num_nodes - 1:
        out.append(Violation("tree", len(seen_edges), f"{len(seen_edges)} edges on {num_nodes} nodes is not a tree"))
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    if len(seen) != num_nodes:
        missing = min(set(range(num_nodes)) - seen)
        out.append(Violation("tree", missing, f"tree is disconnected (node {missing} unreachable from 0)"))
    return out


def _cover_violations(graph, bags, covers) -> list[Violation]:
    out = []
    if covers is None:
        return out
    for x, (bag, cover) in enumerate(zip(bags, covers)):
        union = 0
        for b in cover:
            graph._check_vertex(b.center)
            union |= graph.ball_mask(b.center, b.radius)
        missed = mask_of(bag) & ~union
        if missed:
            v = vertices_of(missed)[0]
            out.append(Violation("cover", (x, v), f"cover of node {x} misses vertex {v}"))
    return out


def _bag_vertex_violations(graph, bags) -> list[Violation]:
    out = []
    for x, bag in enumerate(bags):
        for v in bag:
            if not (isinstance(v, int) and 0 <= v < graph.n):
                out.append(Violation("bag", (x, v), f"bag of node {x} holds invalid vertex {v!r}"))
    return out


def _edge_pairs(graph):
    if isinstance(graph, WeightedGraph):
        return [(u, v) for u, v, _ in graph.edges()]
    return graph.edges()


def validate_tree_decomposition(G, td: TreeDecomposition) -> list[Violation]:
    """All violated axioms (tree shape, edge coverage, vertex connectivity, covers).

    An empty list means ``td`` is a valid tree decomposition of ``G``.
    """
    out = _tree_violations(td.num_nodes, td.tree_edges)
    out += _bag_vertex_violations(G, td.bags)
    if out:
        return out
    bag_masks = [mask_of(b) for b in td.bags]
    for u, v in _edge_pairs(G):
        pair = (1 << u) | (1 << v)
        if not any(m & pair == pair for m in bag_masks):
            out.append(Violation("edge", (u, v), f"edge ({u}, {v}) is in no bag"))
    occurrences = [0] * G.n
    for bag in td.bags:
        for v in bag:
            occurrences[v] += 1
    links = [0] * G.n
    for a, b in td.tree_edges:
        for v in vertices_of(bag_masks[a] & bag_masks[b]):
            links[v] += 1
    for v in range(G.n):
        if occurrences[v] == 0:
            out.append(Violation("vertex", v, f"vertex {v} is in no bag"))
        elif links[v] != occurrences[v] - 1:
            out.append(Violation("connectivity", v, f"nodes whose bags contain vertex {v} are not connected in the tree"))
    out += _cover_violations(G, td.bags, td.covers)
    return out


def validate_tree_partition(G, tp: TreePartition) -> list[Violation]:
    """All violated axioms: tree shape, partition, edges, the claimed spread, covers."""
    out = _tree_violations(tp.num_nodes, tp.tree_edges)
    out += _bag_vertex_violations(G, tp.bags)
    if out:
        return out
    where = [-1] * G.n
    for x, bag in enumerate(tp.bags):
        for v in bag:
            if where[v] >= 0:
                out.append(Violation("partition", v, f"vertex {v} is in bags {where[v]} and {x}"))
            else:
                where[v] = x
    for v in range(G.n):
        if where[v] < 0:
            out.append(Violation("partition", v, f"vertex {v} is in no bag"))
    if out:
        return out
    adjacent = {(a, b) for a, b in tp.tree_edges} | {(b, a) for a, b in tp.tree_edges}

    def close(u, v):
        return where[u] == where[v] or (where[u], where[v]) in adjacent

    for u, v in _edge_pairs(G):
        if not close(u, v):
            out.append(Violation("edge", (u, v), f"edge ({u}, {v}) joins bags {where[u]} and {where[v]}, which are not adjacent"))
    spread = as_rational(tp.spread)
    if spread > 1:
        for u in range(G.n):
            row = G.distances_from(u)
            for v in range(u + 1, G.n):
                if row[v] <= spread and not close(u, v):
                    out.append(Violation("spread", (u, v), f"pair ({u}, {v}) at distance {row[v]} <= {spread} lies in non-adjacent bags"))
    out += _cover_violations(G, tp.bags, tp.covers)
    return out


def _dedupe(balls):
    seen = set()
    out = []
    for b in balls:
        if b not in seen:
            seen.add(b)
            out.append(b)
    return tuple(out)


def tree_partition_to_tree_decomposition(tp: TreePartition, graph=None) -> TreeDecomposition:
    """Subdivide every tree edge ``xy`` with a node whose bag is ``bag(x) | bag(y)``.

    Original nodes keep their ids; the node subdividing ``tree_edges[j]`` gets
    id ``num_nodes + j``. Covers, when present, are concatenated (duplicates
    dropped), so a subdivision cover is at most twice the larger original one.
    """
    problems = _tree_violations(tp.num_nodes, tp.tree_edges)
    if graph is not None:
        problems += validate_tree_partition(graph, tp)
    if problems:
        raise InputError(f"not a valid tree-partition: {problems[0].message}")
    N = tp.num_nodes
    bags = list(tp.bags)
    edges = []
    covers = list(tp.covers) if tp.covers is not None else None
    for j, (a, b) in enumerate(tp.tree_edges):
        bags.append(tuple(sorted(set(tp.bags[a]) | set(tp.bags[b]))))
        edges.append((a, N + j))
        edges.append((N + j, b))
        if covers is not None:
            covers.append(_dedupe(tp.covers[a] + tp.covers[b]))
    return TreeDecomposition(bags, edges, covers)


def _rooted(num_nodes, edges, root=0):
    adj = [[] for _ in range(num_nodes)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [-1] * num_nodes
    depth = [0] * num_nodes
    order = [root]
    parent[root] = root
    for x in order:
        for y in sorted(adj[x]):
            if parent[y] == -1:
                parent[y] = x
                depth[y] = depth[x] + 1
                order.append(y)
    parent[root] = -1
    return adj, parent, depth, order


def balanced_bag(G: Graph, td: TreeDecomposition, mu: WeightFn) -> int:
    """Node id of a sink when each tree edge points to its heavier side.

    A side's weight is ``mu`` of the union of its bags (each vertex counted
    once). Ties point toward the lower node id; the lowest-id sink is returned.
    The returned bag is checked to be a balanced separator for ``mu``.
    """
    problems = validate_tree_decomposition(G, td)
    if problems:
        raise InputError(f"not a valid tree decomposition: {problems[0].message}")
    N = td.num_nodes
    bag_masks = [mask_of(b) for b in td.bags]
    _, parent, _, order = _rooted(N, td.tree_edges)
    below = list(bag_masks)
    subtree = [1 << x for x in range(N)]
    for x in reversed(order[1:]):
        below[parent[x]] |= below[x]
        subtree[parent[x]] |= subtree[x]
    outdeg = [0] * N
    for x in order[1:]:
        p = parent[x]
        rest = 0
        for y in range(N):
            if not (subtree[x] >> y) & 1:
                rest |= bag_masks[y]
        w_child, w_parent = mu.of_mask(below[x]), mu.of_mask(rest)
        if w_child > w_parent:
            head = x
        elif w_child < w_parent:
            head = p
        else:
            head = min(x, p)
        tail = p if head == x else x
        outdeg[tail] += 1
    sink = min(x for x in range(N) if outdeg[x] == 0)
    if not is_balanced_separator(G, mu, td.bags[sink]):
        raise InvariantViolation(f"sink node {sink} does not carry a balanced separator", witness=sink)
    return sink


def potential(balls, r) -> int:
    """``sum 2**(rad/r)`` over a round ball set (radii positive multiples of r)."""
    total = 0
    for b in balls:
        q = b.radius / r
        if b.radius <= 0 or q != int(q):
            raise InputError(f"ball {b} is not round for base radius {r}")
        total += 1 << int(q)
    return total


def is_round(balls, r) -> bool:
    return all(b.radius > 0 and (b.radius / r) == int(b.radius / r) for b in balls)


@dataclass(frozen=True)
class BagCoverStat:
    node: int
    bag_size: int
    cover_size: int
    max_radius: object
    exact: bool


@dataclass
class CoverStats:
    """Per-bag minimum (or greedy) covers at radius r, plus attached-cover totals."""

    r: object
    per_bag: list[BagCoverStat]
    k_hat: int
    r_hat: object
    all_exact: bool
    attached_k_hat: int | None = None
    attached_r_hat: object = None
    attached_potential: int | None = None
    per_bag_potential: list[int] = field(default_factory=list)


def coverability_stats(G: Graph, td: TreeDecomposition, r, k_budget: int) -> CoverStats:
    per_bag = []
    for x, bag in enumerate(td.bags):
        cover: Cover = minimum_cover(G, bag, r, k_budget)
        per_bag.append(BagCoverStat(x, len(bag), len(cover), cover.max_radius, cover.exact))
    stats = CoverStats(
        r=as_rational(r),
        per_bag=per_bag,
        k_hat=max((s.cover_size for s in per_bag), default=0),
        r_hat=max((s.max_radius for s in per_bag), default=0),
        all_exact=all(s.exact for s in per_bag),
    )
    if td.covers is not None:
        stats.attached_k_hat = max((len(c) for c in td.covers), default=0)
        stats.attached_r_hat = max((b.radius for c in td.covers for b in c), default=0)
        if all(is_round(c, r) for c in td.covers):
            stats.per_bag_potential = [potential(c, r) for c in td.covers]
            stats.attached_potential = max(stats.per_bag_potential, default=0)
    return stats


def bfs_layered_tree_partition(graph, root: int = 0) -> TreePartition:
    """Tree-partition from BFS layers split by components of the deeper layers.

    For each layer ``L_i`` and each component ``C`` of ``G[L_i + L_{i+1} + ...]``
    the set ``L_i & C`` is a bag; its parent is the bag of layer ``i - 1`` whose
    component contains ``C``. Edge weights are ignored (hop layers). Further
    components are processed from their lowest vertex and chained to the first.
    """
    hop = graph.unweighted() if isinstance(graph, WeightedGraph) else graph
    n = hop.n
    if n == 0:
        return TreePartition([()], [], spread=1)
    graph._check_vertex(root)
    bags: list[tuple[int, ...]] = []
    edges: list[tuple[int, int]] = []
    remaining = (1 << n) - 1
    roots = []
    start = root
    while remaining:
        row = hop.distances_from(start)
        comp = [v for v in range(n) if row[v] != float("inf")]
        depth = max(row[v] for v in comp)
        layers = [0] * (depth + 1)
        for v in comp:
            layers[row[v]] |= 1 << v
        prev: list[tuple[int, int]] = []  # (component mask, bag id) of the previous layer
        suffix = [0] * (depth + 2)
        for i in range(depth, -1, -1):
            suffix[i] = suffix[i + 1] | layers[i]
        for i in range(depth + 1):
            current = []
            for cmask in component_masks(hop, suffix[i]):
                bag_id = len(bags)
                bags.append(tuple(vertices_of(cmask & layers[i])))
                if i == 0:
                    roots.append(bag_id)
                else:
                    parent = next(b for m, b in prev if m & cmask == cmask)
                    edges.append((parent, bag_id))
                current.append((cmask, bag_id))
            prev = current
        remaining &= ~mask_of(comp)
        if remaining:
            start = (remaining & -remaining).bit_length() - 1
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreePartition(bags, edges, spread=1)


def to_dot(td: TreeDecomposition, name: str = "T") -> str:
    """Graphviz source with each node labelled by its bag."""
    kind = "tree-partition" if isinstance(td, TreePartition) else "tree decomposition"
    lines = [f'graph "{name}" {{', f'  label="{kind}";', "  node [shape=box];"]
    for x, bag in enumerate(td.bags):
        label = "{" + ",".join(map(str, bag)) + "}"
        if td.covers is not None:
            label += "\\n" + " ".join(f"B({b.center},{b.radius})" for b in td.covers[x])
        lines.append(f'  n{x} [label="{x}: {label}"];')
    for a, b in td.tree_edges:
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
