"""Brute-force reference implementations, deliberately sharing no code with coarsetw.

Graphs are given as ``(n, edges)``; everything here works on plain Python sets
and Floyd-Warshall distance tables.
"""

from itertools import combinations, permutations

INF = float("inf")


def apsp(n, edges, weights=None):
    d = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for idx, (u, v) in enumerate(edges):
        w = 1 if weights is None else weights[idx]
        d[u][v] = min(d[u][v], w)
        d[v][u] = min(d[v][u], w)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == INF:
                continue
            di = d[i]
            for j in range(n):
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return d


def components(n, edges, removed=()):
    removed = set(removed)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        if u not in removed and v not in removed:
            parent[find(u)] = find(v)
    groups = {}
    for v in range(n):
        if v not in removed:
            groups.setdefault(find(v), set()).add(v)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def ball(d, c, r):
    return {v for v in range(len(d)) if d[c][v] <= r}


def is_balanced(n, edges, weights, X):
    total = sum(weights)
    return all(2 * sum(weights[v] for v in comp) <= total for comp in components(n, edges, X))


def coverable(d, A, k, r):
    """True iff some ``<= k`` radius-r balls cover A (brute force over all centre sets)."""
    n = len(d)
    A = set(A)
    if not A:
        return True
    for s in range(1, min(k, n) + 1):
        for cs in combinations(range(n), s):
            if A <= set().union(*(ball(d, c, r) for c in cs)):
                return True
    return False


def separable(n, edges, d, weights, k, r):
    """Some centre set of size ``<= k`` whose radius-r ball union is balanced."""
    for s in range(0, min(k, n) + 1):
        for cs in combinations(range(n), s):
            X = set().union(*(ball(d, c, r) for c in cs)) if cs else set()
            if is_balanced(n, edges, weights, X):
                return True
    return False


def bsn_indicators(n, edges, r, k_max):
    d = apsp(n, edges)
    for k in range(1, k_max + 1):
        if all(
            separable(n, edges, d, [1 if (A >> v) & 1 else 0 for v in range(n)], k, r)
            for A in range(1 << n)
        ):
            return k
    return None


def treewidth(n, edges):
    """Minimum over all elimination orders of the largest eliminated degree."""
    if n <= 1:
        return 0
    adj0 = [set() for _ in range(n)]
    for u, v in edges:
        adj0[u].add(v)
        adj0[v].add(u)
    best = n - 1
    for order in permutations(range(n)):
        adj = [set(a) for a in adj0]
        width = 0
        for v in order:
            nb = adj[v]
            width = max(width, len(nb))
            if width >= best:
                break
            for a in nb:
                adj[a] |= nb - {a}
                adj[a].discard(v)
            adj[v] = set()
        best = min(best, width)
    return best


def greedy_cover_count(d, target, r):
    """Greedy set cover of ``target`` by radius-r balls with any centre; most-new-vertices first."""
    n = len(d)
    left = set(target)
    count = 0
    while left:
        best = max(range(n), key=lambda c: len(ball(d, c, r) & left))
        left -= ball(d, best, r)
        count += 1
    return count


def tree_distances(num_nodes, tree_edges):
    return apsp(num_nodes, tree_edges)
