"""Finite-graph network statistics: degree moments and fractions, clustering,
assortativity, their degree-conditioned variants, and empirical ball
distributions.

Every ratio statistic is assembled from exact integer numerators and
denominators (one float division at the end), so oracle comparisons in the
tests are exact equalities.  The zero conventions follow the definitions: a
vanishing denominator yields value 0 with the ``degenerate`` flag set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cliquetree import CodeHistogram
from .counting import emb_count, pattern_from_name
from .graphs import Graph, ball

__all__ = [
    "StatReport",
    "degree_moment",
    "degree_fraction",
    "clustering",
    "conditional_clustering",
    "assortativity",
    "conditional_assortativity",
    "empirical_ball_dist",
]


@dataclass(frozen=True)
class StatReport:
    name: str
    value: float
    numerator: int
    denominator: int
    degenerate: bool = False

    def to_row(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "numerator": str(self.numerator),
            "denominator": str(self.denominator),
            "degenerate": self.degenerate,
        }


def _ratio(name: str, num: int, den: int) -> StatReport:
    if den == 0:
        return StatReport(name, 0.0, num, den, degenerate=True)
    return StatReport(name, float(Fraction(num, den)), num, den)


def _exact_sum_int(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if int(arr.size) * int(np.abs(arr).max()) < 2**62:
        return int(arr.sum(dtype=np.int64))
    return int(sum(int(x) for x in arr))


def degree_moment(G: Graph, k: int) -> float:
    """k-th raw moment of the degree of a uniform vertex, (1/n) sum d(v)^k."""
    if G.vertex_count < 1:
        raise ValueError("degree_moment needs a non-empty graph")
    if k < 1:
        raise ValueError("moment order must be >= 1")
    total = sum(int(d) ** k for d in G.degrees())
    return float(Fraction(total, G.vertex_count))


def degree_fraction(G: Graph, k: int) -> float:
    """Fraction of vertices of degree exactly k."""
    if G.vertex_count < 1:
        raise ValueError("degree_fraction needs a non-empty graph")
    return float(Fraction(int((G.degrees() == k).sum()), G.vertex_count))


def clustering(G: Graph) -> StatReport:
    """emb(K3, G) / emb(P3, G), zero (degenerate) when there are no 2-paths."""
    num = emb_count(pattern_from_name("K3"), G)
    den = emb_count(pattern_from_name("P3"), G)
    return _ratio("alpha", num, den)


def _triangles_at(G: Graph, v: int, nbr_sets: list[set[int]] | None = None) -> int:
    """Ordered pairs (u, w) of distinct neighbours of v with u ~ w (= 2 * triangles)."""
    nbrs = G.neighbors(v)
    count = 0
    if nbr_sets is not None:
        sv = nbr_sets[v]
        for u in nbrs:
            count += len(nbr_sets[int(u)] & sv)
        return count
    sv = set(map(int, nbrs))
    for u in nbrs:
        count += len(sv.intersection(map(int, G.neighbors(int(u)))))
    return count


def conditional_clustering(G: Graph, k: int) -> StatReport:
    """P(v1 v3 edge | v1-v2-v3 ordered path of distinct vertices, d(v2) = k),
    by direct enumeration over the centres of degree k."""
    if k < 2:
        raise ValueError("conditional clustering needs k >= 2")
    centers = np.flatnonzero(G.degrees() == k)
    num = 0
    for v in centers:
        num += _triangles_at(G, int(v))
    den = int(centers.size) * k * (k - 1)
    return _ratio(f"alpha_k({k})", num, den)


def assortativity(G: Graph) -> StatReport:
    """Pearson correlation of endpoint degrees over ordered adjacent pairs.

    With S1 = sum d^2, S2 = sum d^3, P = sum over ordered adjacent pairs of
    d(u) d(v) and 2e ordered pairs total, r = (2e P - S1^2) / (2e S2 - S1^2);
    0 (degenerate) for empty or degree-regular graphs.
    """
    d = G.degrees().astype(np.int64)
    two_e = int(d.sum())
    if two_e == 0:
        return StatReport("assort", 0.0, 0, 0, degenerate=True)
    src = np.repeat(np.arange(G.vertex_count), np.diff(G.indptr))
    P = _exact_sum_int(d[src] * d[G.indices])
    S1 = sum(int(x) ** 2 for x in d)
    S2 = sum(int(x) ** 3 for x in d)
    num = two_e * P - S1 * S1
    den = two_e * S2 - S1 * S1
    if den == 0:
        return StatReport("assort", 0.0, num, den, degenerate=True)
    return StatReport("assort", float(Fraction(num, den)), num, den)


def conditional_assortativity(G: Graph, k: int) -> StatReport:
    """Mean neighbour degree over ordered adjacent pairs whose first endpoint
    has degree k."""
    if k < 1:
        raise ValueError("conditional assortativity needs k >= 1")
    d = G.degrees().astype(np.int64)
    centers = np.flatnonzero(d == k)
    num = 0
    for v in centers:
        num += int(d[G.neighbors(int(v))].sum())
    den = k * int(centers.size)
    return _ratio(f"r_k({k})", num, den)


def empirical_ball_dist(
    G: Graph,
    r: int,
    sample_size: int | None = None,
    rng: np.random.Generator | None = None,
) -> CodeHistogram:
    """Distribution of the canonical code of B_r(G, v) over vertices v.

    Exact mode (all vertices) when sample_size is None, otherwise a uniform
    with-replacement vertex sample; counts are kept so callers can attach
    binomial standard errors.  Equal labelled balls are canonicalized once
    (BFS relabelling in ``ball`` makes repeats frequent).
    """
    if G.vertex_count < 1:
        raise ValueError("empirical_ball_dist needs a non-empty graph")
    if sample_size is None:
        vertices = range(G.vertex_count)
    else:
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        vertices = rng.integers(0, G.vertex_count, size=sample_size).tolist()
    hist = CodeHistogram()
    memo: dict[tuple, bytes] = {}
    for v in vertices:
        b = ball(G, int(v), r)
        g = b.graph
        key = (g.vertex_count, g.indptr.tobytes(), g.indices.tobytes())
        code = memo.get(key)
        if code is None:
            code = b.code
            memo[key] = code
        hist.add(code)
    return hist
