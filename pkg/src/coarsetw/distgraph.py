"""Distance graphs over maximal distance-r independent sets, and their certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InputError, InvariantViolation
from .graph import (
    INF,
    Graph,
    WeightedGraph,
    is_maximal_distance_r_independent,
    maximal_distance_r_independent_set,
)

DEFAULT_SIGMA_WEIGHTED = 3
DEFAULT_SIGMA_UNWEIGHTED = 4


@dataclass(frozen=True, eq=False)
class DistanceGraph:
    """``H(G, I, r, sigma)``; H-vertex ``i`` stands for host vertex ``I[i]``."""

    host: Graph
    I: tuple[int, ...]
    H: WeightedGraph | Graph
    r: int
    sigma: int
    weighted: bool
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.I)})

    def to_h(self, host_vertex: int) -> int:
        try:
            return self._index[host_vertex]
        except KeyError:
            raise InputError(f"vertex {host_vertex} is not in the independent set") from None

    def to_host(self, h: int) -> int:
        return self.I[h]

    @property
    def threshold(self) -> int:
        return self.sigma * self.r


@dataclass(frozen=True)
class PhiMap:
    """Per host vertex, the chosen member of I (a host id) within distance r."""

    phi: tuple[int, ...]

    def __len__(self):
        return len(self.phi)

    def __getitem__(self, u):
        return self.phi[u]

    def h_indices(self, dg: DistanceGraph) -> list[int]:
        return [dg.to_h(x) for x in self.phi]


def build_distance_graph(graph: Graph, r: int, sigma: int | None = None, weighted: bool = True, I: Sequence[int] | None = None):
    """Return ``(DistanceGraph, PhiMap)``.

    Members ``u, v`` of I are adjacent in H iff ``dist_G(u, v) <= sigma * r``;
    in the weighted variant every edge weighs exactly ``sigma * r``. Each host
    vertex maps to its nearest member of I, ties to the lowest id.
    """
    if not isinstance(r, int) or isinstance(r, bool) or r < 1:
        raise InputError(f"r must be a positive integer, got {r!r}")
    if sigma is None:
        sigma = DEFAULT_SIGMA_WEIGHTED if weighted else DEFAULT_SIGMA_UNWEIGHTED
    if not isinstance(sigma, int) or isinstance(sigma, bool) or sigma < 3:
        raise InputError(f"sigma must be an integer >= 3, got {sigma!r}")
    if I is None:
        I = maximal_distance_r_independent_set(graph, r)
    else:
        I = sorted(set(I))
        for v in I:
            graph._check_vertex(v)
        if not is_maximal_distance_r_independent(graph, I, r):
            raise InputError(f"supplied set is not a maximal distance-{r} independent set")
    threshold = sigma * r
    rows = [graph.distances_from(v) for v in I]
    pairs = [
        (i, j)
        for i in range(len(I))
        for j in range(i + 1, len(I))
        if rows[i][I[j]] <= threshold
    ]
    if weighted:
        H = WeightedGraph(len(I), [(i, j, threshold) for i, j in pairs])
    else:
        H = Graph(len(I), pairs)
    phi = []
    for u in range(graph.n):
        d, best = min((rows[i][u], I[i]) for i in range(len(I)))
        if d > r:
            raise InvariantViolation(f"vertex {u} is farther than {r} from the independent set", witness=u)
        phi.append(best)
    dg = DistanceGraph(graph, tuple(I), H, r, sigma, weighted)
    return dg, PhiMap(tuple(phi))


@dataclass(frozen=True)
class PairWitness:
    u: int
    v: int
    dist_g: object
    dist_h: object
    bound: object

    @property
    def slack(self):
        return abs(self.bound - self.dist_h)


@dataclass(frozen=True)
class QuasiIsometryCert:
    """Outcome of an exhaustive pair check of the distortion inequalities.

    ``alpha``/``beta`` are the quasi-isometry constants the checked
    inequalities imply: ``(sigma, sigma*r)`` weighted, ``(sigma*r, 2r)`` unweighted.
    The worst witnesses are the pairs closest to their bound.
    """

    variant: str
    alpha: object
    beta: object
    pairs_checked: int
    worst_lower_witness: PairWitness | None
    worst_upper_witness: PairWitness | None
    density_witness: object


def _bounds(dg: DistanceGraph):
    r, s = dg.r, dg.sigma
    if dg.weighted:
        return (lambda d: d - 2 * r), (lambda d: s * d + s * r)
    return (lambda d: Fraction(d, s * r) - 2 * r), (lambda d: Fraction(d, (s - 2) * r) + 1)


def check_quasi_isometry(G: Graph, dg: DistanceGraph, phi: PhiMap) -> QuasiIsometryCert:
    """Check the distortion inequalities over every pair of host vertices.

    Weighted: ``d_G - 2r <= d_H(phi u, phi v) <= sigma d_G + sigma r``.
    Unweighted: ``d_G / (sigma r) - 2r <= d_H <= d_G / ((sigma - 2) r) + 1``.
    Raises :class:`InvariantViolation` naming the first violating pair.
    """
    if G.n != dg.host.n or len(phi) != G.n:
        raise InputError("distance graph / phi map do not match the host graph")
    lower, upper = _bounds(dg)
    ph = phi.h_indices(dg)
    H = dg.H
    worst_lo = worst_hi = None
    checked = 0
    for u in range(G.n):
        row_g = G.distances_from(u)
        row_h = H.distances_from(ph[u])
        for v in range(u, G.n):
            dgv = row_g[v]
            dhv = row_h[ph[v]]
            checked += 1
            if dgv is INF or dhv is INF:
                if (dgv is INF) != (dhv is INF):
                    raise InvariantViolation(
                        f"pair ({u}, {v}): reachability differs (d_G={dgv}, d_H={dhv})", witness=(u, v)
                    )
                continue
            lo, hi = lower(dgv), upper(dgv)
            if not lo <= dhv:
                raise InvariantViolation(
                    f"pair ({u}, {v}) breaks the lower bound: {lo} > d_H={dhv} (d_G={dgv})", witness=(u, v)
                )
            if not dhv <= hi:
                raise InvariantViolation(
                    f"pair ({u}, {v}) breaks the upper bound: d_H={dhv} > {hi} (d_G={dgv})", witness=(u, v)
                )
            if worst_lo is None or dhv - lo < worst_lo.slack:
                worst_lo = PairWitness(u, v, dgv, dhv, lo)
            if worst_hi is None or hi - dhv < worst_hi.slack:
                worst_hi = PairWitness(u, v, dgv, dhv, hi)
    images = set(ph)
    density = 0
    for w in range(H.n):
        if w in images:
            continue
        row = H.distances_from(w)
        density = max(density, min(row[x] for x in images))
    if dg.weighted:
        alpha, beta = dg.sigma, dg.sigma * dg.r
    else:
        alpha, beta = dg.sigma * dg.r, 2 * dg.r
    if density > beta:
        raise InvariantViolation(f"image of phi is not {beta}-dense (gap {density})", witness=density)
    if G.n <= 1:
        worst_lo = worst_hi = None
    return QuasiIsometryCert(
        "weighted" if dg.weighted else "unweighted", alpha, beta, checked, worst_lo, worst_hi, density
    )


@dataclass(frozen=True)
class DegreeReport:
    max_degree: int
    rho: int
    m_estimate: int
    bound: int
    ok: bool
    note: str = ""


def rho_of(sigma: int) -> int:
    """``floor(log2(sigma) + 1)``, i.e. the bit length of ``sigma``."""
    if sigma < 1:
        raise InputError("sigma must be positive")
    return int(sigma).bit_length()


def check_degree_bound(dg: DistanceGraph, m_estimate: int) -> DegreeReport:
    """Compare ``Delta(H)`` against ``2**(rho * m_estimate)`` (strict)."""
    if m_estimate < 0:
        raise InputError("m_estimate must be nonnegative")
    rho = rho_of(dg.sigma)
    bound = 2 ** (rho * m_estimate)
    delta = dg.H.max_degree()
    ok = delta < bound
    note = "" if ok else "degree bound violated; the doubling estimate may undershoot the true dimension"
    return DegreeReport(delta, rho, m_estimate, bound, ok, note)
