"""Graphs, shortest-path metrics, balls, and ball covers.

Vertices are dense integers ``0..n-1``. Every set-valued result is returned as
an ascending list so outputs are diffable. Unweighted distances are ints;
weighted distances are :class:`fractions.Fraction`. Unreachable pairs are at
distance :data:`INF`.

Internally vertex sets are often handled as Python ``int`` bitmasks (bit ``v``
set iff ``v`` is in the set); the ``*_mask`` helpers expose that view.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Sequence

from .errors import BudgetExceeded, InputError, enumeration_budget

INF = math.inf


def as_rational(value) -> Rational:
    """Coerce ints, Fractions and ``"num/den"`` strings to an exact rational."""
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        try:
            q = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational: {value!r}") from None
        return q.numerator if q.denominator == 1 else q
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InputError(f"not a finite rational: {value!r}")
        q = Fraction(value)
        return q.numerator if q.denominator == 1 else q
    raise InputError(f"not a rational: {value!r}")


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertices_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True, order=True)
class Ball:
    """A ball ``(center, radius)``; the vertex set depends on the host graph."""

    center: int
    radius: Rational

    def __post_init__(self):
        if not isinstance(self.center, int) or self.center < 0:
            raise InputError(f"ball center must be a vertex id, got {self.center!r}")
        radius = as_rational(self.radius)
        if radius < 0:
            raise InputError(f"ball radius must be nonnegative, got {self.radius}")
        object.__setattr__(self, "radius", radius)

    def with_radius(self, radius) -> Ball:
        return Ball(self.center, radius)


class _MetricMixin:
    n: int

    def _check_vertex(self, v):
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < self.n:
            raise InputError(f"invalid vertex id {v!r} for a graph on {self.n} vertices")

    def distances_from(self, source: int) -> tuple:
        """Single-source distances, cached per source."""
        self._check_vertex(source)
        cache = self._dist_cache
        row = cache.get(source)
        if row is None:
            row = self._compute_distances(source)
            cache[source] = row
        return row

    def dist(self, u: int, v: int):
        return self.distances_from(u)[v]

    def ball_mask(self, center: int, radius) -> int:
        row = self.distances_from(center)
        m = 0
        for v, d in enumerate(row):
            if d <= radius:
                m |= 1 << v
        return m


class Graph(_MetricMixin):
    """Finite simple undirected unweighted graph on ``0..n-1``."""

    __slots__ = ("n", "adj", "_masks", "_dist_cache")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if not isinstance(n, int) or n < 0:
            raise InputError(f"vertex count must be a nonnegative integer, got {n!r}")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            if len(e) != 2:
                raise InputError(f"edge must have two endpoints, got {e!r}")
            u, v = e
            for x in (u, v):
                if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
                    raise InputError(f"edge {e!r} references invalid vertex {x!r}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.adj = tuple(tuple(sorted(s)) for s in nbrs)
        self._masks = None
        self._dist_cache = {}

    @classmethod
    def from_networkx(cls, nxg) -> Graph:
        nodes = sorted(nxg.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls(len(nodes), [(index[u], index[v]) for u, v in nxg.edges()])

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return (self.masks[u] >> v) & 1 == 1

    @property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhood of each vertex as a bitmask."""
        if self._masks is None:
            self._masks = tuple(mask_of(a) for a in self.adj)
        return self._masks

    def _compute_distances(self, source):
        dist = [INF] * self.n
        dist[source] = 0
        queue = deque([source])
        adj = self.adj
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for v in adj[u]:
                if dist[v] is INF:
                    dist[v] = du
                    queue.append(v)
        return tuple(dist)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class WeightedGraph(_MetricMixin):
    """Simple undirected graph with nonnegative rational edge weights."""

    __slots__ = ("n", "adj", "_dist_cache", "_masks")

    def __init__(self, n: int, edges: Iterable[Sequence] = ()):
        if not isinstance(n, int) or n < 0:
            raise InputError(f"vertex count must be a nonnegative integer, got {n!r}")
        nbrs: list[dict[int, Rational]] = [{} for _ in range(n)]
        for e in edges:
            if len(e) != 3:
                raise InputError(f"weighted edge must be (u, v, w), got {e!r}")
            u, v, w = e
            for x in (u, v):
                if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
                    raise InputError(f"edge {e!r} references invalid vertex {x!r}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            w = as_rational(w)
            if w < 0:
                raise InputError(f"negative edge weight on {u}-{v}")
            if v in nbrs[u] and nbrs[u][v] != w:
                raise InputError(f"conflicting weights on edge {u}-{v}")
            nbrs[u][v] = w
            nbrs[v][u] = w
        self.n = n
        self.adj = tuple(tuple(sorted(d.items())) for d in nbrs)
        self._dist_cache = {}
        self._masks = None

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> list[tuple[int, int, Rational]]:
        return [(u, v, w) for u in range(self.n) for v, w in self.adj[u] if u < v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(x for x, _ in self.adj[v])

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @property
    def masks(self) -> tuple[int, ...]:
        if self._masks is None:
            self._masks = tuple(mask_of(x for x, _ in a) for a in self.adj)
        return self._masks

    def unweighted(self) -> Graph:
        return Graph(self.n, [(u, v) for u, v, _ in self.edges()])

    def _compute_distances(self, source):
        dist: list = [INF] * self.n
        dist[source] = 0
        heap = [(0, source)]
        done = [False] * self.n
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, w in self.adj[u]:
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        return tuple(dist)

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.m})"


def ball(graph, center: int, radius) -> list[int]:
    """Vertices at distance at most ``radius`` from ``center``, ascending."""
    radius = as_rational(radius)
    if radius < 0:
        raise InputError("radius must be nonnegative")
    row = graph.distances_from(center)
    return [v for v, d in enumerate(row) if d <= radius]


def ball_union(graph, balls: Iterable[Ball]) -> list[int]:
    m = 0
    for b in balls:
        m |= graph.ball_mask(b.center, b.radius)
    return vertices_of(m)


def distance_matrix(graph) -> list[tuple]:
    return [graph.distances_from(u) for u in range(graph.n)]


def component_masks(graph: Graph, alive: int) -> list[int]:
    """Connected components of the subgraph induced by ``alive`` (a bitmask).

    Components come out ordered by their minimum vertex.
    """
    masks = graph.masks
    comps = []
    while alive:
        comp = frontier = alive & -alive
        while frontier:
            grown = 0
            f = frontier
            while f:
                low = f & -f
                grown |= masks[low.bit_length() - 1]
                f ^= low
            grown &= alive & ~comp
            comp |= grown
            frontier = grown
        comps.append(comp)
        alive &= ~comp
    return comps


def components(graph: Graph, removed: Iterable[int] = ()) -> list[list[int]]:
    """Components of ``graph - removed``, each ascending, sorted by minimum."""
    removed = list(removed)
    for v in removed:
        graph._check_vertex(v)
    alive = ((1 << graph.n) - 1) & ~mask_of(removed)
    return [vertices_of(c) for c in component_masks(graph, alive)]


def is_connected(graph: Graph) -> bool:
    return graph.n <= 1 or len(component_masks(graph, (1 << graph.n) - 1)) == 1


def maximal_distance_r_independent_set(graph: Graph, r: int) -> list[int]:
    """Greedy (ascending id) inclusion-maximal set with pairwise distance > r."""
    if not isinstance(r, int) or r < 1:
        raise InputError(f"r must be a positive integer, got {r!r}")
    chosen = []
    blocked = 0
    for v in range(graph.n):
        if not (blocked >> v) & 1:
            chosen.append(v)
            blocked |= graph.ball_mask(v, r)
    return chosen


def is_maximal_distance_r_independent(graph: Graph, I: Sequence[int], r: int) -> bool:
    members = sorted(set(I))
    covered = 0
    for i, u in enumerate(members):
        row = graph.distances_from(u)
        if any(row[v] <= r for v in members[i + 1:]):
            return False
        covered |= graph.ball_mask(u, r)
    return covered == (1 << graph.n) - 1


@dataclass(frozen=True)
class Cover:
    """A ball cover of some vertex set; ``exact`` says it is provably minimum."""

    balls: tuple[Ball, ...]
    exact: bool

    def __len__(self):
        return len(self.balls)

    @property
    def max_radius(self):
        return max((b.radius for b in self.balls), default=0)


def _candidate_centers(graph, target: int, r) -> list[int]:
    # only centres within r of some target vertex can contribute
    reach = 0
    for v in vertices_of(target):
        reach |= graph.ball_mask(v, r)
    return vertices_of(reach)


def greedy_cover(graph, A: Iterable[int], r) -> list[Ball]:
    """Greedy set cover of ``A`` by radius-``r`` balls (ties to lowest centre)."""
    r = as_rational(r)
    target = mask_of(A)
    cands = _candidate_centers(graph, target, r)
    masks = {c: graph.ball_mask(c, r) for c in cands}
    chosen = []
    while target:
        best, gain = None, 0
        for c in cands:
            g = (masks[c] & target).bit_count()
            if g > gain:
                best, gain = c, g
        chosen.append(Ball(best, r))
        target &= ~masks[best]
    return sorted(chosen)


def is_coverable(graph, A: Iterable[int], k: int, r, *, mode: str = "exact", budget=None):
    """Decide whether ``A`` is (k, r)-coverable.

    ``mode="exact"`` returns a witness list of at most ``k`` balls, or ``None``.
    The witness uses the fewest balls possible and, among those, the
    lexicographically least centre tuple (candidate centres ascending).
    Raises :class:`BudgetExceeded` when ``C(#candidates, k)`` is over budget.

    ``mode="greedy"`` returns a :class:`Cover` built greedily; it may use more
    than ``k`` balls and is flagged ``exact=False``.
    """
    A = list(A)
    for v in A:
        graph._check_vertex(v)
    if not isinstance(k, int) or k < 0:
        raise InputError(f"k must be a nonnegative integer, got {k!r}")
    r = as_rational(r)
    if mode == "greedy":
        return Cover(tuple(greedy_cover(graph, A, r)), exact=False)
    if mode != "exact":
        raise InputError(f"unknown cover mode {mode!r}")
    target = mask_of(A)
    if not target:
        return []
    cands = _candidate_centers(graph, target, r)
    if budget is None:
        budget = enumeration_budget()
    size = math.comb(len(cands), min(k, len(cands)))
    if size > budget:
        raise BudgetExceeded(
            f"exact cover search over C({len(cands)}, {k}) = {size} centre sets exceeds budget {budget}",
            size=size,
            budget=budget,
        )
    masks = [graph.ball_mask(c, r) for c in cands]
    for s in range(1, min(k, len(cands)) + 1):
        for combo in combinations(range(len(cands)), s):
            u = 0
            for i in combo:
                u |= masks[i]
            if target & ~u == 0:
                return [Ball(cands[i], r) for i in combo]
    return None


def minimum_cover(graph, A: Iterable[int], r, k_budget: int, *, budget=None) -> Cover:
    """Smallest cover found with at most ``k_budget`` balls, else a greedy one."""
    A = list(A)
    try:
        found = is_coverable(graph, A, k_budget, r, budget=budget)
    except BudgetExceeded:
        found = None
    if found is not None:
        return Cover(tuple(found), exact=True)
    return Cover(tuple(greedy_cover(graph, A, r)), exact=False)


def estimate_doubling_dimension(graph: Graph, radius_cap: int) -> int:
    """Upper estimate of the doubling dimension from greedy covers.

    Returns the least ``m`` such that for every vertex ``u`` and integer
    ``1 <= r' <= radius_cap``, the greedy cover of ``Ball(u, 2r')`` by radius-``r'``
    balls has at most ``2**m`` balls. Greedy never undercounts the optimum, so
    at the radii examined this is an upper estimate; radii above the cap and
    non-integer radii are not examined.
    """
    if not isinstance(radius_cap, int) or radius_cap < 1:
        raise InputError(f"radius_cap must be a positive integer, got {radius_cap!r}")
    worst = 1
    for rr in range(1, radius_cap + 1):
        for u in range(graph.n):
            target = graph.ball_mask(u, 2 * rr)
            row = graph.distances_from(u)
            # ties go to the centre farthest from u, then lowest id: covering the
            # rim first keeps greedy optimal on paths and cycles
            cands = sorted(vertices_of(graph.ball_mask(u, 3 * rr)), key=lambda c: (-row[c], c))
            masks = [graph.ball_mask(c, rr) & target for c in cands]
            used = 0
            while target:
                best, gain = -1, 0
                for i, m in enumerate(masks):
                    g = (m & target).bit_count()
                    if g > gain:
                        best, gain = i, g
                target &= ~masks[best]
                used += 1
            worst = max(worst, used)
    return (worst - 1).bit_length()
