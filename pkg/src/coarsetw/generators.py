"""Deterministic graph families for tests and bound-certifying runs."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InputError
from .graph import Graph

FAMILIES = ("path", "cycle", "grid", "path_universal", "binary_tree", "random_geometric", "gnp")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int | None = None
    rows: int | None = None
    cols: int | None = None
    seed: int = 0
    side: int | None = None
    threshold: int = 1
    p: float = 0.1

    def label(self) -> str:
        if self.family == "grid":
            return f"grid{self.rows}x{self.cols}"
        if self.family in ("random_geometric", "gnp"):
            return f"{self.family}{self.n}s{self.seed}"
        return f"{self.family}{self.n}"


def _positive(name, value, minimum=1):
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise InputError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


def path(n: int) -> Graph:
    _positive("n", n)
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    _positive("n", n, 3)
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid(rows: int, cols: int) -> Graph:
    _positive("rows", rows)
    _positive("cols", cols)
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def path_universal(n: int) -> Graph:
    """Path on ``0..n-1`` plus vertex ``n`` adjacent to all of them."""
    _positive("n", n)
    return Graph(n + 1, [(i, i + 1) for i in range(n - 1)] + [(i, n) for i in range(n)])


def binary_tree(n: int) -> Graph:
    """Complete binary tree in heap numbering: parent of ``v`` is ``(v-1)//2``."""
    _positive("n", n)
    return Graph(n, [((v - 1) // 2, v) for v in range(1, n)])


def random_geometric(n: int, seed: int = 0, side: int | None = None, threshold: int = 1) -> Graph:
    """``n`` distinct points on a ``side x side`` grid, joined at L1 distance <= threshold."""
    _positive("n", n)
    _positive("threshold", threshold)
    if side is None:
        side = max(2, int((2 * n) ** 0.5) + 1)
    _positive("side", side)
    if side * side < n:
        raise InputError(f"a {side}x{side} grid cannot hold {n} distinct points")
    rng = random.Random(seed)
    cells = rng.sample(range(side * side), n)
    pts = [divmod(c, side) for c in cells]
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if abs(pts[i][0] - pts[j][0]) + abs(pts[i][1] - pts[j][1]) <= threshold
    ]
    return Graph(n, edges)


def gnp(n: int, p: float, seed: int = 0) -> Graph:
    _positive("n", n)
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p!r}")
    rng = random.Random(seed)
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def generate(spec: FamilySpec) -> Graph:
    f = spec.family
    if f == "path":
        return path(spec.n)
    if f == "cycle":
        return cycle(spec.n)
    if f == "grid":
        return grid(spec.rows, spec.cols)
    if f == "path_universal":
        return path_universal(spec.n)
    if f == "binary_tree":
        return binary_tree(spec.n)
    if f == "random_geometric":
        return random_geometric(spec.n, spec.seed, spec.side, spec.threshold)
    if f == "gnp":
        return gnp(spec.n, spec.p, spec.seed)
    raise InputError(f"unknown family {f!r}; expected one of {', '.join(FAMILIES)}")
