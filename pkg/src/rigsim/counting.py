"""Exact homomorphism and embedding counts of small connected patterns.

Counts are exact Python integers.  Three engines, picked per call:

* dense contraction: the count is a tensor contraction of adjacency-matrix
  factors over the pattern's edges, evaluated by bucket elimination.  Used
  for hosts small enough to densify, with certified no-overflow dtype choice
  (every intermediate is a count bounded by n^h, so float64 is exact below
  2^53 and int64 below 2^62).
* sparse closed forms on large hosts for the patterns the statistics in this
  package actually need there: every connected pattern on at most 4 vertices
  plus the stars K_{1,t}, evaluated from degree vectors and A^2 via
  scipy.sparse.
* exhaustive backtracking with Python big-int accumulators as the fallback,
  exact for any pattern/host, but output-sensitive.

Embedding (injective) counts come from homomorphism counts by Moebius
inversion over vertex-coincidence partitions: emb(H, G) equals the sum over
partitions of V(H) with independent blocks of
prod_B (-1)^(|B|-1) (|B|-1)!  *  hom(H/theta, G).
Rooted counts are local: the rooted count at v only depends on the ball of
radius ecc(root) around v, so large hosts are handled by extracting that ball
and running the dense engine on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .canon import unrooted_code
from .graphs import Graph, RootedGraph, ball

__all__ = [
    "Pattern",
    "hom_count",
    "emb_count",
    "rooted_emb_count",
    "sidorenko_bound",
    "pattern_from_name",
    "connected_patterns",
    "distinct_rootings",
]

MAX_PATTERN_VERTICES = 8
_DENSE_HOST_LIMIT = 1500
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class Pattern:
    """Connected pattern graph, optionally rooted.

    The default size cap is 8 vertices (the coincidence-partition machinery
    grows like the Bell numbers); callers that need more can raise
    ``max_vertices`` explicitly."""

    graph: Graph
    root: int | None = None
    max_vertices: int = MAX_PATTERN_VERTICES

    def __post_init__(self) -> None:
        h = self.graph.vertex_count
        if not 2 <= h <= self.max_vertices:
            raise ValueError(f"pattern must have between 2 and {self.max_vertices} vertices")
        if not _is_connected_edges(h, self.edge_tuple()):
            raise ValueError("pattern must be connected")
        if self.root is not None and not 0 <= self.root < h:
            raise ValueError("pattern root out of range")

    def edge_tuple(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.graph.edges())

    @property
    def h(self) -> int:
        return self.graph.vertex_count

    def rooted(self, root: int) -> "Pattern":
        return Pattern(self.graph, root, self.max_vertices)

    def root_eccentricity(self) -> int:
        if self.root is None:
            raise ValueError("pattern has no root")
        dist = _bfs_dist(self.graph, self.root)
        return max(dist)


def _is_connected_edges(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * n
    seen[0] = True
    stack = [0]
    cnt = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                cnt += 1
                stack.append(w)
    return cnt == n


def _bfs_dist(g: Graph, src: int) -> list[int]:
    dist = [-1] * g.vertex_count
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                w = int(w)
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


# -- pattern library ------------------------------------------------------------


def pattern_from_name(name: str) -> Pattern:
    """Named small patterns: K2..K8, P2..P8, C3..C8, S1..S7 (stars K_{1,t}),
    paw, diamond."""
    name = name.strip()
    if name == "paw":
        return Pattern(Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3)]))
    if name == "diamond":
        return Pattern(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]))
    kind, num = name[0], name[1:]
    k = int(num)
    if kind == "K":
        return Pattern(Graph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)]))
    if kind == "P":  # path on k vertices
        return Pattern(Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)]))
    if kind == "C":
        return Pattern(Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)]))
    if kind == "S":  # star K_{1,k}: centre 0
        return Pattern(Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)]))
    raise ValueError(f"unknown pattern name: {name!r}")


def connected_patterns(h: int) -> list[Pattern]:
    """All connected patterns on exactly h vertices, up to isomorphism."""
    seen: dict[bytes, Pattern] = {}
    pairs = list(itertools.combinations(range(h), 2))
    for bits in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        if len(edges) < h - 1:
            continue
        if not _is_connected_edges(h, edges):
            continue
        g = Graph.from_edges(h, edges)
        seen.setdefault(unrooted_code(g), Pattern(g))
    return list(seen.values())


def distinct_rootings(p: Pattern) -> list[Pattern]:
    """One rooted pattern per root orbit (rootings equal up to isomorphism
    are deduplicated)."""
    out: dict[bytes, Pattern] = {}
    for v in range(p.h):
        out.setdefault(RootedGraph(p.graph, v).code, p.rooted(v))
    return list(out.values())


# -- Moebius inversion over coincidence partitions -------------------------------


def _set_partitions(n: int) -> Iterable[list[list[int]]]:
    parts: list[list[int]] = []

    def rec(i: int):
        if i == n:
            yield [list(b) for b in parts]
            return
        for b in parts:
            b.append(i)
            yield from rec(i + 1)
            b.pop()
        parts.append([i])
        yield from rec(i + 1)
        parts.pop()

    yield from rec(0)


@lru_cache(maxsize=None)
def _coincidence_terms(
    h: int, edges: tuple[tuple[int, int], ...], root: int | None
) -> tuple[tuple[int, tuple[tuple[int, int], ...], int | None, int], ...]:
    """(quotient h, quotient edges, quotient root, Moebius weight) per partition
    of the pattern vertices into independent blocks."""
    adj = [set() for _ in range(h)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    terms = []
    for blocks in _set_partitions(h):
        ok = all(not (adj[x] & set(b)) for b in blocks for x in b)
        if not ok:
            continue
        blk = [0] * h
        for bi, b in enumerate(blocks):
            for x in b:
                blk[x] = bi
        q_edges = sorted({(min(blk[a], blk[b]), max(blk[a], blk[b])) for a, b in edges})
        mu = 1
        for b in blocks:
            sign = -1 if (len(b) - 1) % 2 else 1
            mu *= sign * _factorial(len(b) - 1)
        q_root = None if root is None else blk[root]
        terms.append((len(blocks), tuple(q_edges), q_root, mu))
    return tuple(terms)


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# -- dense contraction engine ------------------------------------------------------
#
# hom(H, G) is the contraction of one adjacency-matrix factor per pattern edge.
# A bucket-elimination DP over a greedy minimum-boundary vertex order keeps the
# largest intermediate at n^(treewidth(H)); the last factor of each bucket is
# contracted with tensordot so the peak tensor never gains an extra axis.
# Counts are bounded by n^h, so float64 arithmetic (BLAS-fast) is exact while
# n^h < 2^53; int64 covers the rest up to 2^62.

_DP_MAX_ENTRIES = 4 * 10**7
_FLOAT_SAFE = 2**53


def _dense_adjacency(g: Graph, dtype) -> np.ndarray:
    n = g.vertex_count
    A = np.zeros((n, n), dtype=dtype)
    src = np.repeat(np.arange(n), np.diff(g.indptr))
    A[src, g.indices] = 1
    return A


@lru_cache(maxsize=None)
def _elimination_order(h: int, edges: tuple[tuple[int, int], ...], pinned: int | None) -> tuple[int, ...]:
    """Greedy minimum-boundary elimination order of the pattern vertices,
    excluding a pinned vertex."""
    adj: dict[int, set[int]] = {v: set() for v in range(h) if v != pinned}
    for a, b in edges:
        if a != pinned and b != pinned:
            adj[a].add(b)
            adj[b].add(a)
    order = []
    while adj:
        v = min(adj, key=lambda u: (len(adj[u]), u))
        order.append(v)
        nbrs = adj.pop(v)
        for u in nbrs:
            adj[u].discard(v)
            adj[u].update(nbrs - {u})
    return tuple(order)


class _DPMemory(Exception):
    """Raised when the elimination DP would exceed the tensor budget."""


def _align(arr: np.ndarray, vars_: tuple[int, ...], union: tuple[int, ...]) -> np.ndarray:
    """View a factor (axes = its sorted vars) in the space of ``union``
    (sorted superset) with size-1 axes where a variable is absent."""
    shape = tuple(arr.shape[vars_.index(u)] if u in vars_ else 1 for u in union)
    return arr.reshape(shape)


def _hom_dp(
    h: int,
    edges: tuple[tuple[int, int], ...],
    A: np.ndarray,
    pinned: int | None = None,
    pin_row: np.ndarray | None = None,
) -> int:
    """Exact hom count by bucket elimination.

    ``pinned`` maps that pattern vertex to a fixed host vertex with adjacency
    indicator ``pin_row`` (used for rooted counts).  Factor var tuples are
    kept sorted; each elimination either multiplies the whole bucket and sums
    out the vertex, or, when some factor shares only the eliminated vertex
    with the rest, contracts it via tensordot so the peak tensor stays one
    axis smaller (this is what keeps cliques at n^(h-1)).
    """
    n = A.shape[0]
    factors: list[tuple[tuple[int, ...], np.ndarray]] = []
    for a, b in edges:
        if a == pinned:
            factors.append(((b,), pin_row))
        elif b == pinned:
            factors.append(((a,), pin_row))
        else:
            factors.append(((a, b), A))
    for v in _elimination_order(h, edges, pinned):
        bucket = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        # a factor sharing only v with the others can be tensordot-ed in
        last = None
        for i, (vars_, _) in enumerate(bucket):
            others = set().union(*(set(b[0]) for j, b in enumerate(bucket) if j != i)) - {v}
            if not (set(vars_) - {v}) & others:
                if last is None or len(vars_) > len(bucket[last][0]):
                    last = i
        if len(bucket) == 1:
            vars_, arr = bucket[0]
            new_vars = tuple(u for u in vars_ if u != v)
            factors.append((new_vars, arr.sum(axis=vars_.index(v))))
            continue
        if last is not None:
            last_vars, last_arr = bucket[last]
            rest = [b for j, b in enumerate(bucket) if j != last]
        else:
            last_vars, last_arr = None, None
            rest = bucket
        union = tuple(sorted(set().union(*(set(f[0]) for f in rest))))
        if n ** len(union) > _DP_MAX_ENTRIES:
            raise _DPMemory()
        acc = _align(rest[0][1], rest[0][0], union)
        for vars_, arr in rest[1:]:
            acc = acc * _align(arr, vars_, union)
        if last_arr is None:
            new_vars = tuple(u for u in union if u != v)
            factors.append((new_vars, acc.sum(axis=union.index(v))))
        else:
            other = tuple(u for u in last_vars if u != v)
            out_vars = tuple(u for u in union if u != v) + other
            if out_vars and n ** len(out_vars) > _DP_MAX_ENTRIES:
                raise _DPMemory()
            acc_t = np.moveaxis(acc, union.index(v), -1)
            last_t = np.moveaxis(last_arr, last_vars.index(v), -1)
            res = np.tensordot(acc_t, last_t, axes=([-1], [-1]))
            perm = sorted(range(len(out_vars)), key=lambda i: out_vars[i])
            factors.append((tuple(sorted(out_vars)), np.transpose(res, perm)))
    if A.dtype == np.int64:
        out = 1
        for vars_, arr in factors:
            assert vars_ == ()
            out *= int(arr)
        return out
    out = 1.0
    for vars_, arr in factors:
        assert vars_ == ()
        out = out * float(arr)
    return int(round(out))


# -- sparse closed-form engine -----------------------------------------------------


@lru_cache(maxsize=None)
def _family_key(name: str) -> bytes:
    return unrooted_code(pattern_from_name(name).graph)


_FAMILY_NAMES = ("K2", "P3", "K3", "P4", "S3", "C4", "paw", "diamond", "K4")


def _identify_family(h: int, edges: tuple[tuple[int, int], ...]) -> str | None:
    deg = [0] * h
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    if sorted(deg) == [1] * (h - 1) + [h - 1] and h >= 3:
        return f"S{h - 1}"  # star K_{1, h-1}
    if h > 4:
        return None
    code = unrooted_code(Graph.from_edges(h, edges))
    for name in _FAMILY_NAMES:
        if code == _family_key(name):
            return name
    return None


class _HostArrays:
    """Degree vector and A, A@A for a large sparse host, built once."""

    def __init__(self, g: Graph):
        n = g.vertex_count
        src = np.repeat(np.arange(n), np.diff(g.indptr))
        self.A = sp.csr_matrix(
            (np.ones(g.indices.size, dtype=np.int64), (src, g.indices)), shape=(n, n)
        )
        self.d = g.degrees().astype(np.int64)
        self._M: sp.csr_matrix | None = None

    @property
    def M(self) -> sp.csr_matrix:
        if self._M is None:
            self._M = (self.A @ self.A).tocsr()
        return self._M


def _exact_sum(arr: np.ndarray) -> int:
    """Sum of an int64 array as an exact Python int (object fallback when the
    int64 total could overflow)."""
    if arr.size == 0:
        return 0
    bound = int(arr.size) * int(np.abs(arr).max())
    if bound < _INT64_SAFE:
        return int(arr.sum(dtype=np.int64))
    return int(sum(int(x) for x in arr))


def _hom_sparse(name: str, g: Graph, host: _HostArrays) -> int:
    if name == "K2":
        return int(host.d.sum())
    if name.startswith("S"):  # star K_{1,t}: hom = sum d^t
        t = int(name[1:])
        return int(sum(int(x) ** t for x in host.d))
    if name == "P3":
        return int(sum(int(x) ** 2 for x in host.d))
    if name == "P4":  # ordered adjacent pairs weighted by d(u) d(v)
        Ad = host.A @ host.d  # entries bounded by max_d^2, safe in int64
        if host.d.size and int(host.d.max()) * int(Ad.max(initial=0)) * host.d.size < _INT64_SAFE:
            return int((host.d * Ad).sum(dtype=np.int64))
        return int(sum(int(a) * int(b) for a, b in zip(host.d, Ad)))
    if name == "K3":
        N = host.M.multiply(host.A)
        return _exact_sum(np.asarray(N.sum(axis=1)).ravel())
    if name == "C4":  # trace(A^4) = Frobenius norm of A^2 squared
        M = host.M
        return _exact_sum(M.data.astype(np.int64) ** 2) if (M.data.max(initial=0)) ** 2 * M.nnz < _INT64_SAFE else int(sum(int(x) ** 2 for x in M.data))
    if name == "paw":  # triangle rooted anywhere + pendant: sum_v tri2(v) d(v)
        N = host.M.multiply(host.A)
        tri2 = np.asarray(N.sum(axis=1)).ravel().astype(np.int64)
        return _exact_sum(tri2 * host.d)
    if name == "diamond":
        N = host.M.multiply(host.A).tocsr()
        return _exact_sum(N.data.astype(np.int64) ** 2)
    if name == "K4":
        return 24 * _k4_subgraphs(g)
    raise AssertionError(name)


def _k4_subgraphs(g: Graph) -> int:
    """Number of K4 subgraphs: for each edge, edges inside the common
    neighbourhood; every K4 is counted once per its 6 edges."""
    nbr = g.adjacency_sets()
    total = 0
    for u in range(g.vertex_count):
        for v in nbr[u]:
            if v <= u:
                continue
            common = nbr[u] & nbr[v]
            for w in common:
                total += len(common & nbr[w])
    # each K4 edge {u,v} contributes ordered (w,x) pairs: 6 edges * 2 = 12
    return total // 12


# -- backtracking engine -------------------------------------------------------------


def _hom_backtrack(
    h: int,
    edges: tuple[tuple[int, int], ...],
    g: Graph,
    injective: bool,
    root: int | None = None,
    root_image: int | None = None,
) -> int:
    adj_p: list[set[int]] = [set() for _ in range(h)]
    for a, b in edges:
        adj_p[a].add(b)
        adj_p[b].add(a)
    # connected elimination order, root (if pinned) first, then max-degree greedy
    start = root if root is not None else max(range(h), key=lambda v: len(adj_p[v]))
    order = [start]
    placed = {start}
    while len(order) < h:
        cand = [v for v in range(h) if v not in placed and adj_p[v] & placed]
        nxt = max(cand, key=lambda v: (len(adj_p[v] & placed), len(adj_p[v])))
        order.append(nxt)
        placed.add(nxt)
    back = [[u for u in adj_p[v] if u in set(order[:i])] for i, v in enumerate(order)]
    nbr = g.adjacency_sets()
    images: dict[int, int] = {}
    all_v = set(range(g.vertex_count))

    def candidates(i: int) -> set[int]:
        cs: set[int] | None = None
        for u in back[i]:
            s = nbr[images[u]]
            cs = set(s) if cs is None else cs & s
            if not cs:
                return set()
        if cs is None:
            cs = all_v
        if injective:
            cs = cs - set(images.values())
        return cs

    def rec(i: int) -> int:
        if i == h:
            return 1
        if not injective:
            # product shortcut: remaining vertices whose pattern neighbours are
            # all placed contribute independent factors
            rest = order[i:]
            if all(set(adj_p[v]) <= set(order[: i]) for v in rest):
                out = 1
                for j in range(i, h):
                    out *= len(candidates(j))
                return out
        total = 0
        cs = candidates(i)
        if i == 0 and root_image is not None:
            cs = cs & {root_image}
        for x in sorted(cs):
            images[order[i]] = x
            total += rec(i + 1)
            del images[order[i]]
        return total

    return rec(0)


# -- public operations -----------------------------------------------------------------


@lru_cache(maxsize=2)
def _cached_dense(g: Graph, floats: bool) -> np.ndarray:
    return _dense_adjacency(g, np.float64 if floats else np.int64)


def _hom_raw(h: int, edges: tuple[tuple[int, int], ...], g: Graph, dense: np.ndarray | None, host: _HostArrays | None) -> int:
    if dense is not None:
        try:
            return _hom_dp(h, edges, dense)
        except _DPMemory:
            pass
    name = _identify_family(h, edges)
    if name is not None:
        return _hom_sparse(name, g, host if host is not None else _HostArrays(g))
    return _hom_backtrack(h, edges, g, injective=False)


def _prepare_host(g: Graph, h: int) -> tuple[np.ndarray | None, _HostArrays | None]:
    n = g.vertex_count
    if n <= _DENSE_HOST_LIMIT and n**h < _INT64_SAFE:
        return _cached_dense(g, n**h < _FLOAT_SAFE), None
    return None, _HostArrays(g)


def hom_count(H: Pattern, G: Graph) -> int:
    """Exact number of homomorphisms (adjacency-preserving maps) H -> G."""
    dense, host = _prepare_host(G, H.h)
    return _hom_raw(H.h, H.edge_tuple(), G, dense, host)


def emb_count(H: Pattern, G: Graph) -> int:
    """Exact number of embeddings (injective homomorphisms) H -> G."""
    dense, host = _prepare_host(G, H.h)
    total = 0
    for q_h, q_edges, _, mu in _coincidence_terms(H.h, H.edge_tuple(), None):
        total += mu * _hom_raw(q_h, q_edges, G, dense, host)
    return total


def rooted_emb_count(H: Pattern, G: Graph, v: int, hom_mode: bool = False) -> int:
    """Embeddings of rooted H into G pinning root -> v (homomorphisms when
    ``hom_mode``).  Evaluated on the radius-ecc(root) ball around v, which
    determines the count."""
    if H.root is None:
        raise ValueError("rooted_emb_count needs a rooted pattern")
    if not 0 <= v < G.vertex_count:
        raise ValueError("host vertex out of range")
    b = ball(G, v, H.root_eccentricity())
    bg = b.graph
    n = bg.vertex_count
    edges = H.edge_tuple()
    dense = _cached_dense(bg, n**H.h < _FLOAT_SAFE) if (n <= _DENSE_HOST_LIMIT and n**H.h < _INT64_SAFE) else None

    def rooted_hom(q_h: int, q_edges: tuple, q_root: int) -> int:
        if dense is not None:
            try:
                return _hom_dp(q_h, q_edges, dense, pinned=q_root, pin_row=dense[0])
            except _DPMemory:
                pass
        return _hom_backtrack(q_h, q_edges, bg, injective=False, root=q_root, root_image=0)

    if hom_mode:
        return rooted_hom(H.h, edges, H.root)
    total = 0
    for q_h, q_edges, q_root, mu in _coincidence_terms(H.h, edges, H.root):
        total += mu * rooted_hom(q_h, q_edges, q_root)
    return total


def sidorenko_bound(H: Pattern, G: Graph) -> tuple[int, int, bool]:
    """hom(H, G), the degree-power bound sum_v d(v)^(h-1), and whether the
    bound holds (it must, for connected H)."""
    hom = hom_count(H, G)
    p = H.h - 1
    bound = sum(int(d) ** p for d in G.degrees())
    return hom, bound, hom <= bound
