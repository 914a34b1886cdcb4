"""Balanced separators coverable by few balls, and brute-force tw/bsn oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, InputError, enumeration_budget
from .graph import Ball, Graph, as_rational, component_masks, mask_of, vertices_of

#: default cap on ``n`` for the 2**n indicator enumeration
INDICATOR_ENUM_LIMIT = 20
#: default cap on ``n`` for the subset DP behind :func:`exact_treewidth`
TREEWIDTH_LIMIT = 12


@dataclass(frozen=True)
class WeightFn:
    """Nonnegative rational vertex weights with a cached total."""

    weights: tuple

    def __post_init__(self):
        ws = tuple(as_rational(w) for w in self.weights)
        if any(w < 0 for w in ws):
            raise InputError("vertex weights must be nonnegative")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "total", sum(ws))
        support = 0
        indicator = True
        for v, w in enumerate(ws):
            if w == 1:
                support |= 1 << v
            elif w != 0:
                indicator = False
        object.__setattr__(self, "_indicator", support if indicator else None)

    @classmethod
    def uniform(cls, n: int) -> WeightFn:
        return cls((1,) * n)

    @classmethod
    def zeros(cls, n: int) -> WeightFn:
        return cls((0,) * n)

    @classmethod
    def indicator(cls, n: int, vertices: Iterable[int]) -> WeightFn:
        ws = [0] * n
        for v in vertices:
            if not 0 <= v < n:
                raise InputError(f"indicator vertex {v} out of range")
            ws[v] = 1
        return cls(tuple(ws))

    def __len__(self):
        return len(self.weights)

    @property
    def indicator_mask(self) -> int | None:
        """Bitmask of the support when every weight is 0 or 1, else ``None``."""
        return self._indicator

    def of(self, vertices: Iterable[int]):
        return sum((self.weights[v] for v in vertices), 0)

    def of_mask(self, mask: int):
        if self._indicator is not None:
            return (mask & self._indicator).bit_count()
        return self.of(vertices_of(mask))


@dataclass(frozen=True)
class SeparatorWitness:
    balls: tuple[Ball, ...]
    union: tuple[int, ...]
    balanced_for: WeightFn

    @property
    def centers(self) -> list[int]:
        return [b.center for b in self.balls]


def _check_weights(graph, mu: WeightFn):
    if len(mu) != graph.n:
        raise InputError(f"weight function has {len(mu)} entries, graph has {graph.n} vertices")


def _heaviest(comps: Sequence[int], mu: WeightFn):
    return max((mu.of_mask(c) for c in comps), default=0)


def _balanced_comps(comps: Sequence[int], mu: WeightFn) -> bool:
    total = mu.total
    ind = mu.indicator_mask
    if ind is not None:
        return all(2 * (c & ind).bit_count() <= total for c in comps)
    return all(2 * mu.of_mask(c) <= total for c in comps)


def is_balanced_separator(graph: Graph, mu: WeightFn, X: Iterable[int]) -> bool:
    """True iff every component of ``graph - X`` has weight at most ``mu(V)/2``."""
    _check_weights(graph, mu)
    X = list(X)
    for v in X:
        graph._check_vertex(v)
    alive = ((1 << graph.n) - 1) & ~mask_of(X)
    return _balanced_comps(component_masks(graph, alive), mu)


class SeparatorOracle:
    """Finds (k, r)-coverable balanced separators on a fixed graph.

    Exact mode scans centre sets by size ``0..k`` and, within a size, in
    lexicographic order; the first balanced ball union is returned. Components
    of each union are cached, so repeated calls with different weights (as the
    builders make) stay cheap.
    """

    _CACHE_LIMIT = 500_000

    def __init__(self, graph: Graph, k: int, r, *, mode: str = "exact", budget=None):
        if not isinstance(k, int) or k < 1:
            raise InputError(f"k must be a positive integer, got {k!r}")
        r = as_rational(r)
        if r < 0:
            raise InputError("r must be nonnegative")
        if mode not in ("exact", "greedy"):
            raise InputError(f"unknown oracle mode {mode!r}")
        self.graph = graph
        self.k = k
        self.r = r
        self.mode = mode
        self.exact = mode == "exact"
        self.calls = 0
        if budget is None:
            budget = enumeration_budget()
        n = graph.n
        if self.exact:
            size = math.comb(n, min(k, n))
            if size > budget:
                raise BudgetExceeded(
                    f"exact separator search over C({n}, {k}) = {size} centre sets exceeds budget {budget}",
                    size=size,
                    budget=budget,
                )
        self._balls = [graph.ball_mask(c, r) for c in range(n)]
        self._full = (1 << n) - 1
        self._comps: dict[int, list[int]] = {}

    def comps_of(self, union: int) -> list[int]:
        comps = self._comps.get(union)
        if comps is None:
            comps = component_masks(self.graph, self._full & ~union)
            if len(self._comps) < self._CACHE_LIMIT:
                self._comps[union] = comps
        return comps

    def _witness(self, centers, union, mu):
        return SeparatorWitness(
            tuple(Ball(c, self.r) for c in centers), tuple(vertices_of(union)), mu
        )

    def __call__(self, mu: WeightFn) -> SeparatorWitness | None:
        _check_weights(self.graph, mu)
        self.calls += 1
        if self.exact:
            return self._exact(mu)
        return self._greedy(mu)

    def _exact(self, mu):
        n = self.graph.n
        balls = self._balls
        for s in range(0, min(self.k, n) + 1):
            for combo in combinations(range(n), s):
                union = 0
                for c in combo:
                    union |= balls[c]
                if _balanced_comps(self.comps_of(union), mu):
                    return self._witness(combo, union, mu)
        return None

    def _greedy(self, mu):
        chosen: list[int] = []
        union = 0
        if _balanced_comps(self.comps_of(union), mu):
            return self._witness(chosen, union, mu)
        for _ in range(min(self.k, self.graph.n)):
            best, best_w = None, None
            for c in range(self.graph.n):
                if c in chosen:
                    continue
                w = _heaviest(self.comps_of(union | self._balls[c]), mu)
                if best_w is None or w < best_w:
                    best, best_w = c, w
            chosen.append(best)
            union |= self._balls[best]
            if _balanced_comps(self.comps_of(union), mu):
                return self._witness(sorted(chosen), union, mu)
        return None


def find_separator(graph: Graph, mu: WeightFn, k: int, r, mode: str = "exact", *, budget=None):
    """A balanced separator for ``mu`` covered by at most ``k`` radius-``r`` balls, or ``None``."""
    return SeparatorOracle(graph, k, r, mode=mode, budget=budget)(mu)


# ---------------------------------------------------------------------------
# distance-r balanced separator number over indicator weights


def _candidate_unions(graph: Graph, k: int, r, budget: int, prune: bool = True):
    n = graph.n
    size = sum(math.comb(n, s) for s in range(1, min(k, n) + 1))
    if size > budget:
        raise BudgetExceeded(
            f"bsn search over {size} centre sets (n={n}, k={k}) exceeds budget {budget}",
            size=size,
            budget=budget,
        )
    balls = [graph.ball_mask(c, r) for c in range(n)]
    seen = set()
    unions = []
    for s in range(1, min(k, n) + 1):
        for combo in combinations(range(n), s):
            u = 0
            for c in combo:
                u |= balls[c]
            if u not in seen:
                seen.add(u)
                unions.append(u)
    if prune and len(unions) <= 4000:
        # a superset of a balanced union is balanced, so only maximal unions matter
        unions.sort(key=lambda u: -u.bit_count())
        kept = []
        for u in unions:
            if not any(u & ~w == 0 for w in kept):
                kept.append(u)
        unions = kept
    full = (1 << n) - 1
    return [(u, component_masks(graph, full & ~u)) for u in unions]


def _balances_indicator(comps, A: int) -> bool:
    total = A.bit_count()
    return all(2 * (c & A).bit_count() <= total for c in comps)


def _bad_indicator_enumerate(graph, cands, limit):
    n = graph.n
    if n > limit:
        raise BudgetExceeded(
            f"indicator enumeration needs 2**{n} subsets; n={n} exceeds the limit {limit}",
            size=n,
            budget=limit,
        )
    subsets = np.arange(1 << n, dtype=np.uint64)
    sizes = np.bitwise_count(subsets).astype(np.int64)
    bad = np.ones(1 << n, dtype=bool)
    bad[0] = False  # the zero weight function is balanced by anything
    for _, comps in cands:
        if not comps:
            return None
        majority = np.zeros(1 << n, dtype=bool)
        for c in comps:
            cnt = np.bitwise_count(subsets & np.uint64(c)).astype(np.int64)
            majority |= 2 * cnt > sizes
        bad &= majority
        if not bad.any():
            return None
    return int(np.flatnonzero(bad)[0])


def _solve_majority_milp(n, active):
    """Find a nonempty A such that each active union leaves a strict A-majority component."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    ycount = sum(len(comps) for _, comps in active)
    nv = n + ycount
    rows = 1 + len(active) + ycount
    mat = lil_matrix((rows, nv))
    lo = np.full(rows, -np.inf)
    hi = np.full(rows, np.inf)
    mat[0, :n] = 1
    lo[0] = 1
    big = n + 1
    row = 1
    col = n
    for _, comps in active:
        mat[row, col:col + len(comps)] = 1
        lo[row] = 1
        row += 1
        for c in comps:
            # y = 1  =>  2 * A(C) - A(V) >= 1
            for v in range(n):
                mat[row, v] = 1 if (c >> v) & 1 else -1
            mat[row, col] = -big
            lo[row] = 1 - big
            row += 1
            col += 1
    res = milp(
        c=np.zeros(nv),
        constraints=LinearConstraint(mat.tocsr(), lo, hi),
        integrality=np.ones(nv),
        bounds=Bounds(np.zeros(nv), np.ones(nv)),
    )
    if res.status == 2:  # infeasible
        return None
    if res.x is None:
        raise RuntimeError(f"MILP solver failed: {res.message}")
    return mask_of(v for v in range(n) if res.x[v] > 0.5)


def _bad_indicator_milp(graph, cands):
    if any(not comps for _, comps in cands):
        return None
    active = []
    while True:
        A = _solve_majority_milp(graph.n, active)
        if A is None:
            return None
        killer = next((cand for cand in cands if _balances_indicator(cand[1], A)), None)
        if killer is None:
            return A
        active.append(killer)


def find_bad_indicator(graph: Graph, k: int, r, *, method: str = "enumerate", n_limit: int = INDICATOR_ENUM_LIMIT, budget=None):
    """A vertex set whose indicator admits no (k, r)-coverable balanced separator.

    Returns ``None`` when every indicator weight function is separable. The
    ``"enumerate"`` method checks all ``2**n`` subsets; ``"milp"`` searches for a
    counterexample with a mixed-integer program, adding one separating ball
    union at a time (every counterexample it returns is re-verified exactly);
    ``"auto"`` enumerates when ``n <= n_limit``.
    """
    if budget is None:
        budget = enumeration_budget()
    r = as_rational(r)
    if graph.n == 0:
        return None
    if method == "auto":
        method = "enumerate" if graph.n <= n_limit else "milp"
    cands = _candidate_unions(graph, k, r, budget, prune=True)
    if method == "enumerate":
        A = _bad_indicator_enumerate(graph, cands, n_limit)
    elif method == "milp":
        A = _bad_indicator_milp(graph, cands)
    else:
        raise InputError(f"unknown method {method!r}")
    return None if A is None else vertices_of(A)


def bsn_over_indicators(graph: Graph, r, k_max: int, *, method: str = "enumerate", n_limit: int = INDICATOR_ENUM_LIMIT, budget=None) -> int | None:
    """Smallest ``k <= k_max`` such that every 0/1 weight function on ``graph``
    has a (k, r)-coverable balanced separator; ``None`` if ``k_max`` is too small.

    With ``r = 0`` this is the classical balanced separator number restricted to
    indicator weights. The result never exceeds the bsn over all real weights.
    """
    if not isinstance(k_max, int) or k_max < 1:
        raise InputError(f"k_max must be a positive integer, got {k_max!r}")
    if method == "enumerate" and graph.n > n_limit:
        raise BudgetExceeded(
            f"indicator enumeration needs 2**{graph.n} subsets; n={graph.n} exceeds the limit {n_limit}",
            size=graph.n,
            budget=n_limit,
        )
    for k in range(1, k_max + 1):
        if find_bad_indicator(graph, k, r, method=method, n_limit=n_limit, budget=budget) is None:
            return k
    return None


# ---------------------------------------------------------------------------
# exact treewidth


def exact_treewidth(graph: Graph, *, limit: int = TREEWIDTH_LIMIT) -> int:
    """Treewidth by dynamic programming over vertex subsets (elimination prefixes).

    ``TW(S) = min_{v in S} max(TW(S - v), |Q(S - v, v)|)`` where ``Q(S, v)`` is
    the set of vertices outside ``S + v`` reachable from ``v`` through ``S``.
    """
    n = graph.n
    if n > limit:
        raise BudgetExceeded(f"exact treewidth limited to n <= {limit}, got n={n}", size=n, budget=limit)
    if n <= 1:
        return 0
    masks = graph.masks
    full = (1 << n) - 1

    def q_size(S, v):
        seen = 1 << v
        frontier = seen
        inside = S | seen
        while frontier:
            grown = 0
            f = frontier
            while f:
                low = f & -f
                grown |= masks[low.bit_length() - 1]
                f ^= low
            grown &= ~seen
            seen |= grown
            frontier = grown & S
        return (seen & ~inside).bit_count()

    tw = [0] * (1 << n)
    tw[0] = -1
    # S - v < S numerically, so ascending order has every dependency ready
    for S in range(1, 1 << n):
        best = n
        f = S
        while f:
            low = f & -f
            v = low.bit_length() - 1
            f ^= low
            rest = S ^ low
            val = max(tw[rest], q_size(rest, v))
            if val < best:
                best = val
        tw[S] = best
    return tw[full]
