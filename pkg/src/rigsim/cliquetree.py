"""Two-type branching trees and their clique-tree balls.

The tree has root offspring ~ D1 and, deeper, offspring distributed as the
size-biased law minus one of the type that alternates by generation (odd
generations are attributes).  Interpreting generations of even/odd parity as
the two parts of a bipartite graph and projecting onto the even part yields
the random clique tree whose radius-r ball around the root only depends on
the first 2r generations, so sampling truncates there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .graphs import BipartiteMultigraph, RootedGraph, ball, intersection_graph
from .laws import DegreeLaw, offspring_law

__all__ = [
    "CapExceeded",
    "GWTree",
    "CliqueTreeBall",
    "CodeHistogram",
    "sample_gw_tree",
    "sample_clique_tree_ball",
    "ball_distribution_mc",
    "tv_distance",
    "DEFAULT_NODE_CAP",
]

DEFAULT_NODE_CAP = 10**7
CAP_BUCKET = b"__cap_exceeded__"


class CapExceeded(RuntimeError):
    """A sampled tree outgrew the node cap (supercritical runaway)."""


@dataclass(frozen=True)
class GWTree:
    """Rooted tree as parent pointers; node 0 is the root, nodes are numbered
    in breadth-first (generation) order."""

    parents: np.ndarray  # parent id per node, -1 for the root
    generation: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.parents.size)

    @property
    def depth(self) -> int:
        return int(self.generation.max()) if self.node_count else 0


def sample_gw_tree(
    D1: DegreeLaw,
    D2: DegreeLaw,
    depth: int,
    rng: np.random.Generator,
    node_cap: int = DEFAULT_NODE_CAP,
) -> GWTree:
    """Sample the two-type tree truncated after ``depth`` generations.

    Root offspring ~ D1; a node in generation k >= 1 has offspring count
    distributed as the size-biased D2 (k odd) or D1 (k even) minus one.
    Zero-mean laws are fine as long as their size-biased version is never
    reached (e.g. D1 == 0 gives the single-node tree).
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    parents = [np.full(1, -1, dtype=np.int64)]
    gens = [np.zeros(1, dtype=np.int64)]
    total = 1
    gen_ids = np.zeros(1, dtype=np.int64)
    offspring: dict[int, DegreeLaw] = {}
    for k in range(depth):
        if gen_ids.size == 0:
            break
        if k == 0:
            counts = D1.sample(rng, 1)
        else:
            parity = k % 2
            if parity not in offspring:
                offspring[parity] = offspring_law(D2 if parity == 1 else D1)
            counts = offspring[parity].sample(rng, gen_ids.size)
        n_new = int(counts.sum())
        if total + n_new > node_cap:
            raise CapExceeded(f"tree exceeded node cap {node_cap} at generation {k + 1}")
        if n_new == 0:
            break
        parents.append(np.repeat(gen_ids, counts))
        gens.append(np.full(n_new, k + 1, dtype=np.int64))
        gen_ids = np.arange(total, total + n_new, dtype=np.int64)
        total += n_new
    return GWTree(np.concatenate(parents), np.concatenate(gens))


@dataclass(frozen=True)
class CliqueTreeBall:
    """Radius-r ball of the clique tree around its root, plus the tree depth
    (2r) it was derived from."""

    rooted: RootedGraph
    tree_depth: int


def _tree_to_bipartite(tree: GWTree) -> BipartiteMultigraph:
    even = tree.generation % 2 == 0
    ids = np.arange(tree.node_count)
    part1 = ids[even]
    part2 = ids[~even]
    idx1 = {int(v): i for i, v in enumerate(part1)}
    idx2 = {int(v): i for i, v in enumerate(part2)}
    pairs = []
    for child in range(1, tree.node_count):
        parent = int(tree.parents[child])
        if even[child]:
            pairs.append((idx1[child], idx2[parent]))
        else:
            pairs.append((idx1[parent], idx2[child]))
    return BipartiteMultigraph.from_pairs(part1.size, max(part2.size, 1), pairs)


def clique_tree_ball_from_tree(tree: GWTree, r: int) -> CliqueTreeBall:
    """Project a (depth >= 2r) tree to its clique tree and take the radius-r
    root ball.  The root is part-1 index 0 by construction."""
    G = intersection_graph(_tree_to_bipartite(tree))
    return CliqueTreeBall(ball(G, 0, r), 2 * r)


def sample_clique_tree_ball(
    D1: DegreeLaw,
    D2: DegreeLaw,
    r: int,
    rng: np.random.Generator,
    node_cap: int = DEFAULT_NODE_CAP,
) -> CliqueTreeBall:
    if r < 0:
        raise ValueError("radius must be non-negative")
    tree = sample_gw_tree(D1, D2, 2 * r, rng, node_cap)
    return clique_tree_ball_from_tree(tree, r)


@dataclass
class CodeHistogram:
    """Empirical distribution over canonical ball codes.

    ``counts`` maps code -> occurrences; the reserved key ``CAP_BUCKET``
    collects samples whose tree hit the node cap (they carry full weight in
    total-variation comparisons, which is the conservative choice)."""

    counts: dict[bytes, int] = field(default_factory=dict)
    total: int = 0

    def add(self, code: bytes, k: int = 1) -> None:
        self.counts[code] = self.counts.get(code, 0) + k
        self.total += k

    def probabilities(self) -> dict[bytes, float]:
        return {c: k / self.total for c, k in self.counts.items()}

    def to_rows(self) -> list[dict]:
        rows = []
        for code in sorted(self.counts):
            rows.append(
                {
                    "code_hex": code.hex(),
                    "count": self.counts[code],
                    "probability": self.counts[code] / self.total,
                }
            )
        return rows


def tv_distance(p: Mapping[bytes, float], q: Mapping[bytes, float]) -> float:
    """Total variation distance; codes missing on one side carry mass 0 there.

    Keys are summed in sorted order so the float result is bit-identical
    across runs (set order would follow the salted bytes hash)."""
    keys = sorted(set(p) | set(q))
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def ball_distribution_mc(
    D1: DegreeLaw,
    D2: DegreeLaw,
    r: int,
    samples: int,
    rng: np.random.Generator,
    node_cap: int = DEFAULT_NODE_CAP,
) -> CodeHistogram:
    """Monte Carlo distribution of the canonical code of the radius-r clique
    tree ball.

    Radius-1 balls are a join of cliques at the root, determined by the
    multiset of non-trivial attribute offspring counts, so sampling is
    batched and each distinct multiset is canonicalized once; larger radii
    sample trees one by one with a memo on the labelled ball (BFS labelling
    makes equal structures collide often).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    hist = CodeHistogram()
    if r == 0:
        from .graphs import Graph

        code = RootedGraph(Graph.empty(1), 0).code
        hist.add(code, samples)
        return hist
    if r == 1:
        d1s = D1.sample(rng, samples)
        total = int(d1s.sum())
        zs = offspring_law(D2).sample(rng, total) if total else np.empty(0, dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(d1s)])
        cache: dict[tuple[int, ...], bytes] = {}
        for i in range(samples):
            sizes = zs[offsets[i] : offsets[i + 1]]
            if 1 + sizes.size + int(sizes.sum()) > node_cap:
                hist.add(CAP_BUCKET)
                continue
            key = tuple(sorted(int(z) for z in sizes if z > 0))
            code = cache.get(key)
            if code is None:
                code = _ball_code_from_clique_sizes(key)
                cache[key] = code
            hist.add(code)
        return hist
    memo: dict[tuple, bytes] = {}
    for _ in range(samples):
        try:
            b = sample_clique_tree_ball(D1, D2, r, rng, node_cap)
        except CapExceeded:
            hist.add(CAP_BUCKET)
            continue
        g = b.rooted.graph
        key = (g.vertex_count, g.indptr.tobytes(), g.indices.tobytes())
        code = memo.get(key)
        if code is None:
            code = b.rooted.code
            memo[key] = code
        hist.add(code)
    return hist


def _ball_code_from_clique_sizes(sizes: tuple[int, ...]) -> bytes:
    """Canonical code of the radius-1 ball with the given attribute offspring
    counts: the root joined to disjoint cliques of the given sizes."""
    parents = [-1] + [0] * len(sizes)
    gens = [0] + [1] * len(sizes)
    nxt = 1 + len(sizes)
    for ai, z in enumerate(sizes, start=1):
        parents.extend([ai] * z)
        gens.extend([2] * z)
        nxt += z
    tree = GWTree(np.asarray(parents, dtype=np.int64), np.asarray(gens, dtype=np.int64))
    return clique_tree_ball_from_tree(tree, 1).rooted.code
