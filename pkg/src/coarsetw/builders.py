"""Recursive tree-decomposition builders driven by a balanced-separator oracle.

Both builders work on frames ``(S, U)`` where ``U`` is one component of
``G - S`` and a ball set covers ``S``. A frame asks the oracle for a separator
``Z`` balanced for the indicator of ``U``, emits a node with bag
``S | (Z & U)``, and recurses into the components of ``G[U] - Z``.

:func:`decompose_simple` keeps accumulating radius-``r`` balls, so covers grow
by ``k`` per level. :func:`decompose_round` keeps covers at ``O(k^2 log k)``
balls by merging crowded balls into larger ones and tracks radius growth with
the potential ``sum 2**(rad/r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .decomposition import TreeDecomposition, is_round, potential, validate_tree_decomposition
from .errors import CapExceeded, DecompositionFailure, InputError, InvariantViolation
from .graph import Ball, Graph, component_masks, mask_of, vertices_of
from .separator import SeparatorOracle, WeightFn


def gamma_bound(k: int) -> int:
    """``floor(2000 * k**2 * log2 k)``: the cover-size cap of the round builder."""
    if k < 1:
        raise InputError("k must be positive")
    if k & (k - 1) == 0:
        return 2000 * k * k * (k.bit_length() - 1)
    return math.floor(2000 * k * k * math.log2(k))


def crowding_alpha(k: int) -> int:
    """``2 + ceil(log2(2k))``."""
    return 2 + (2 * k - 1).bit_length()


@dataclass
class BuilderParams:
    k: int
    r: int
    gamma_cap: int | None = None
    oracle_mode: str = "exact"
    recursion_limit: int | None = None
    check_invariants: bool = True
    alpha: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InputError(f"k must be a positive integer, got {self.k!r}")
        if not isinstance(self.r, int) or self.r < 1:
            raise InputError(f"r must be a positive integer, got {self.r!r}")
        if self.gamma_cap is None:
            self.gamma_cap = gamma_bound(self.k)
        if self.gamma_cap < 0:
            raise InputError("gamma_cap must be nonnegative")
        self.alpha = crowding_alpha(self.k)


@dataclass
class BuildStats:
    frames: int = 0
    max_depth: int = 0
    oracle_calls: int = 0
    merges: int = 0
    max_frame_cover: int = 0


def _dedupe(balls):
    seen = set()
    out = []
    for b in balls:
        if b not in seen:
            seen.add(b)
            out.append(b)
    return out


class _Builder:
    def __init__(self, G: Graph, params: BuilderParams):
        self.G = G
        self.params = params
        self.oracle = SeparatorOracle(G, params.k, params.r, mode=params.oracle_mode)
        self.full = (1 << G.n) - 1
        self.bags: list[tuple[int, ...]] = []
        self.covers: list[tuple[Ball, ...]] = []
        self.edges: list[tuple[int, int]] = []
        self.stats = BuildStats()
        self._balls: dict[Ball, int] = {}
        self.depth_limit = params.recursion_limit
        if self.depth_limit is None:
            self.depth_limit = max(G.n - 1, 0).bit_length() + 1

    def ball_mask(self, b: Ball) -> int:
        m = self._balls.get(b)
        if m is None:
            m = self._balls[b] = self.G.ball_mask(b.center, b.radius)
        return m

    def union_of(self, balls) -> int:
        u = 0
        for b in balls:
            u |= self.ball_mask(b)
        return u

    def separator(self, weights_mask: int, S: int, U: int, depth: int):
        mu = WeightFn.indicator(self.G.n, vertices_of(weights_mask))
        w = self.oracle(mu)
        self.stats.oracle_calls += 1
        if w is None:
            frame = {"S": vertices_of(S), "U": vertices_of(U), "depth": depth}
            raise DecompositionFailure(
                f"no ({self.params.k},{self.params.r})-coverable balanced separator for a frame "
                f"with |S|={S.bit_count()}, |U|={U.bit_count()} at depth {depth}",
                frame=frame,
            )
        return w

    def check_frame(self, S: int, U: int, cover, depth: int):
        self.stats.frames += 1
        self.stats.max_depth = max(self.stats.max_depth, depth)
        self.stats.max_frame_cover = max(self.stats.max_frame_cover, len(cover))
        if depth > self.depth_limit:
            raise InvariantViolation(f"recursion depth {depth} exceeds {self.depth_limit}", witness=depth)
        if not self.params.check_invariants:
            return
        if U not in component_masks(self.G, self.full & ~S):
            raise InvariantViolation("frame U is not a component of G - S", witness=vertices_of(U))
        if S & ~self.union_of(cover):
            raise InvariantViolation("frame cover misses part of S", witness=vertices_of(S & ~self.union_of(cover)))

    def add_node(self, bag: int, cover) -> int:
        self.bags.append(tuple(vertices_of(bag)))
        self.covers.append(tuple(cover))
        return len(self.bags) - 1

    def run(self) -> TreeDecomposition:
        G = self.G
        if G.n == 0:
            return TreeDecomposition([()], [], [()])
        roots = [self.frame(0, U, [], 0) for U in component_masks(G, self.full)]
        for a, b in zip(roots, roots[1:]):
            self.edges.append((a, b))
        td = TreeDecomposition(self.bags, self.edges, self.covers)
        if self.params.check_invariants:
            problems = validate_tree_decomposition(G, td)
            if problems:
                raise InvariantViolation(f"builder produced an invalid decomposition: {problems[0].message}", witness=problems)
        return td


class SimpleBuilder(_Builder):
    """Covers accumulate every separator met on the way down."""

    def frame(self, S: int, U: int, cover, depth: int) -> int:
        self.check_frame(S, U, cover, depth)
        w = self.separator(U, S, U, depth)
        Z = mask_of(w.union)
        bag = S | (Z & U)
        node_cover = _dedupe(list(cover) + list(w.balls))
        node = self.add_node(bag, node_cover)
        for A in component_masks(self.G, U & ~Z):
            if self.params.check_invariants and 2 * A.bit_count() > U.bit_count():
                raise InvariantViolation("child component holds more than half of U", witness=vertices_of(A))
            child = self.frame(bag, A, node_cover, depth + 1)
            self.edges.append((node, child))
        return node


def uncrowd(G: Graph, balls, params: BuilderParams, stats: BuildStats | None = None) -> list[Ball]:
    """Merge crowded balls, then drop balls contained in another.

    A vertex ``x`` is ``l``-crowded when at least ``2**alpha`` balls of radius
    exactly ``l*r`` have centres within ``alpha*r`` of it. Scanning ``l``
    ascending and then ``x`` ascending, all those balls are replaced by one ball
    of radius ``(l + alpha) * r`` at ``x``; repeat until nothing is crowded.
    Containment is decided on vertex sets, not radii.
    """
    r, alpha = params.r, params.alpha
    threshold = 1 << alpha
    reach = alpha * r
    balls = list(balls)
    if not is_round(balls, r):
        raise InputError("uncrowd needs a round ball set")
    while True:
        found = None
        for level in sorted({b.radius // r for b in balls}):
            group = [b for b in balls if b.radius == level * r]
            if len(group) < threshold:
                continue
            counts = [0] * G.n
            for b in group:
                for v in vertices_of(G.ball_mask(b.center, reach)):
                    counts[v] += 1
            x = next((v for v in range(G.n) if counts[v] >= threshold), None)
            if x is not None:
                found = (level, x)
                break
        if found is None:
            break
        level, x = found
        row = G.distances_from(x)
        balls = [b for b in balls if not (b.radius == level * r and row[b.center] <= reach)]
        balls.append(Ball(x, (level + alpha) * r))
        if stats is not None:
            stats.merges += 1
    masks = {b: G.ball_mask(b.center, b.radius) for b in set(balls)}
    order = sorted(set(balls), key=lambda b: (-masks[b].bit_count(), b.center, b.radius))
    kept: list[Ball] = []
    for b in order:
        if not any(masks[b] & ~masks[k] == 0 for k in kept):
            kept.append(b)
    return sorted(kept)


def crowded_pairs(G: Graph, balls, params: BuilderParams) -> list[tuple[int, int]]:
    """All ``(l, x)`` with ``x`` being ``l``-crowded; empty after :func:`uncrowd`."""
    r, alpha = params.r, params.alpha
    out = []
    for level in sorted({b.radius // r for b in balls}):
        counts = [0] * G.n
        for b in balls:
            if b.radius == level * r:
                for v in vertices_of(G.ball_mask(b.center, alpha * r)):
                    counts[v] += 1
        out += [(level, v) for v in range(G.n) if counts[v] >= 1 << alpha]
    return out


class RoundBuilder(_Builder):
    """Covers stay round; crowded balls are merged before each split."""

    def __init__(self, G: Graph, params: BuilderParams):
        super().__init__(G, params)
        self.claim_bound = 2 * params.alpha * (1 << params.alpha)

    def frame(self, S: int, U: int, B, depth: int) -> int:
        G, p = self.G, self.params
        r, alpha = p.r, p.alpha
        self.check_frame(S, U, B, depth)
        B1 = uncrowd(G, B, p, self.stats)
        if p.check_invariants:
            self._check_uncrowded(B, B1)
        centers = [b.center for b in B1]
        D_U = self.separator(U, S, U, depth)
        D_O = self.separator(mask_of(centers), S, U, depth)
        D = sorted(set(D_U.balls) | set(D_O.balls))
        Z = self.union_of(D)
        near_d = 0
        for b in D:
            near_d |= G.ball_mask(b.center, alpha * r)
        D_hat = [b for b in B1 if (near_d >> b.center) & 1]
        others = [b for b in B1 if not (near_d >> b.center) & 1]
        node = self.add_node(S | (Z & U), _dedupe(list(B) + D))
        host_cover: dict[int, list[Ball]] = {}
        for A in component_masks(G, U & ~Z):
            if p.check_invariants and 2 * A.bit_count() > U.bit_count():
                raise InvariantViolation("child component holds more than half of U", witness=vertices_of(A))
            W = next(w for w in component_masks(G, self.full & ~Z) if w & A)
            if W not in host_cover:
                outside = [b.radius for b in others if not (W >> b.center) & 1]
                R_W = max(outside + [(alpha - 1) * r])
                D_W = [Ball(b.center, R_W - (alpha - 2) * r) for b in D]
                B1_W = [b for b in B1 if (W >> b.center) & 1]
                B_W = _dedupe(D_hat + D_W + B1_W)
                if len(B_W) > p.gamma_cap:
                    raise CapExceeded(
                        f"child cover has {len(B_W)} balls, above gamma_cap={p.gamma_cap}",
                        frame={"S": vertices_of(S), "U": vertices_of(U), "W": vertices_of(W), "depth": depth},
                    )
                host_cover[W] = B_W
            B_W = host_cover[W]
            S_A = (Z & (U | S)) | (S & W)
            if p.check_invariants and S_A & ~self.union_of(B_W):
                raise InvariantViolation(
                    "child cover misses part of the child separator", witness=vertices_of(S_A & ~self.union_of(B_W))
                )
            child = self.frame(S_A, A, B_W, depth + 1)
            self.edges.append((node, child))
        return node

    def _check_uncrowded(self, B, B1):
        G, p = self.G, self.params
        if len(B1) > len(B) or potential(B1, p.r) > potential(B, p.r):
            raise InvariantViolation("uncrowding increased the size or potential of the cover")
        if self.union_of(B) & ~self.union_of(B1):
            raise InvariantViolation("uncrowding shrank the covered set")
        if crowded_pairs(G, B1, p):
            raise InvariantViolation("a crowded vertex survived uncrowding", witness=crowded_pairs(G, B1, p))
        if len({b.center for b in B1}) != len(B1):
            raise InvariantViolation("uncrowded balls share a centre")
        counts = [0] * G.n
        for b in B1:
            for v in vertices_of(G.ball_mask(b.center, p.alpha * p.r)):
                counts[v] += 1
        worst = max(counts, default=0)
        if worst > self.claim_bound:
            raise InvariantViolation(
                f"{worst} balls centred near one vertex, above 2*alpha*2**alpha = {self.claim_bound}", witness=worst
            )


def decompose_simple(G: Graph, params: BuilderParams) -> TreeDecomposition:
    """Tree decomposition whose bag covers are radius-r balls, at most ``k*(ceil(log2 n)+2)`` each."""
    return SimpleBuilder(G, params).run()


def decompose_round(G: Graph, params: BuilderParams) -> TreeDecomposition:
    """Tree decomposition with round bag covers of bounded size and potential.

    Requires ``k >= 2`` unless ``gamma_cap`` is given explicitly, since the
    default cap vanishes at ``k = 1``.
    """
    if params.k < 2 and params.gamma_cap == gamma_bound(params.k):
        raise InputError("the round builder needs k >= 2 with the default gamma_cap (it is 0 at k = 1)")
    return RoundBuilder(G, params).run()


# ---------------------------------------------------------------------------
# bound certification


@dataclass(frozen=True)
class BoundCheck:
    name: str
    claimed: object
    observed: object
    ok: bool


def _ceil_log2(n: int) -> int:
    return max(n - 1, 0).bit_length()


def simple_bounds(G: Graph, td: TreeDecomposition, k: int, r: int) -> list[BoundCheck]:
    problems = validate_tree_decomposition(G, td)
    covers = td.covers or []
    radii = sorted({b.radius for c in covers for b in c})
    size_bound = k * (_ceil_log2(G.n) + 2)
    largest = max((len(c) for c in covers), default=0)
    return [
        BoundCheck("valid tree decomposition", 0, len(problems), not problems),
        BoundCheck("covers present", True, td.covers is not None, td.covers is not None),
        BoundCheck("cover radii equal r", [r], radii, all(x == r for x in radii)),
        BoundCheck("max cover size <= k(ceil(log2 n)+2)", size_bound, largest, largest <= size_bound),
    ]


def round_bounds(G: Graph, td: TreeDecomposition, k: int, r: int, gamma_cap: int | None = None) -> list[BoundCheck]:
    if gamma_cap is None:
        gamma_cap = gamma_bound(k)
    problems = validate_tree_decomposition(G, td)
    covers = td.covers or []
    round_ok = all(is_round(c, r) for c in covers)
    largest = max((len(c) for c in covers), default=0)
    phi = max((potential(c, r) for c in covers), default=0) if round_ok else None
    phi_bound = 4 * k * (_ceil_log2(G.n) + 1)
    top = max((b.radius for c in covers for b in c), default=0)
    checks = [
        BoundCheck("valid tree decomposition", 0, len(problems), not problems),
        BoundCheck("covers present", True, td.covers is not None, td.covers is not None),
        BoundCheck("covers round", True, round_ok, round_ok),
        BoundCheck("max cover size <= Gamma+2k", gamma_cap + 2 * k, largest, largest <= gamma_cap + 2 * k),
        BoundCheck("max potential <= 4k(ceil(log2 n)+1)", phi_bound, phi, phi is not None and phi <= phi_bound),
    ]
    if G.n >= 2 and round_ok:
        # R <= r log2(12 k log2 n)  <=>  2**(2**(R/r)) <= n**(12k), exact in integers
        t = int(top // r)
        ok = 2 ** (2**t) <= G.n ** (12 * k)
        claimed = r * (math.log2(k) + math.log2(math.log2(G.n)) + math.log2(12)) if G.n > 1 else 0
        checks.append(BoundCheck("max radius <= r(log k + log log n + log 12)", round(claimed, 6), top, ok))
    else:
        checks.append(BoundCheck("max radius <= r(log k + log log n + log 12)", "n/a (n < 2)", top, round_ok))
    return checks
