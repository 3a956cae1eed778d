"""Samplers for the four random bipartite graph models and the clique planting
perturbation.

Every generator is a pure function of its arguments and the supplied
``numpy.random.Generator``; identical inputs give bit-identical bipartite
graphs.  Mean part-1 / part-2 degrees are linked through beta = n2/n1: the
active model prescribes part-1 degrees (attribute degrees come out
asymptotically Poisson), the passive model mirrors it, the inhomogeneous model
uses the clipped weight-product edge probabilities, and the configuration
model realises arbitrary prescribed degree sequences by a uniform half-edge
matching (multi-edges allowed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graphs import BipartiteMultigraph, Graph
from .laws import DegreeLaw, WeightLaw, degree_law_from_config, weight_law_from_config

__all__ = [
    "ModelConfig",
    "gen_active",
    "gen_passive",
    "gen_inhomogeneous",
    "gen_configuration",
    "gen_degree_sequences",
    "plant_clique",
    "generate_bipartite",
]


def _floyd_subset(rng: np.random.Generator, m: int, k: int) -> list[int]:
    """Floyd's algorithm: uniform k-subset of {0, ..., m-1} in O(k) expected time."""
    chosen: set[int] = set()
    for j in range(m - k, m):
        t = int(rng.integers(0, j + 1))
        chosen.add(t if t not in chosen else j)
    return list(chosen)


def gen_active(n1: int, n2: int, P: DegreeLaw, rng: np.random.Generator) -> BipartiteMultigraph:
    """Each part-1 vertex draws X ~ P and a uniform X-subset of attributes."""
    X = P.sample(rng, n1)
    if X.size and int(X.max()) > n2:
        raise ValueError(f"sampled attribute-set size {int(X.max())} exceeds n2={n2}")
    pairs: list[tuple[int, int]] = []
    for v in range(n1):
        for w in _floyd_subset(rng, n2, int(X[v])):
            pairs.append((v, w))
    return BipartiteMultigraph.from_pairs(n1, n2, pairs)


def gen_passive(n1: int, n2: int, P: DegreeLaw, rng: np.random.Generator) -> BipartiteMultigraph:
    """Each attribute draws X ~ P and a uniform X-subset of part-1 vertices."""
    X = P.sample(rng, n2)
    if X.size and int(X.max()) > n1:
        raise ValueError(f"sampled member-set size {int(X.max())} exceeds n1={n1}")
    pairs: list[tuple[int, int]] = []
    for w in range(n2):
        for u in _floyd_subset(rng, n1, int(X[w])):
            pairs.append((u, w))
    return BipartiteMultigraph.from_pairs(n1, n2, pairs)


def gen_inhomogeneous(
    n1: int, n2: int, xi1: WeightLaw, xi2: WeightLaw, rng: np.random.Generator
) -> BipartiteMultigraph:
    """Weights xi drawn per vertex; pair (v, w) kept independently with
    probability min(xi1_v xi2_w / sqrt(n1 n2), 1).

    Two exact strategies: thin a Binomial(n2, p_max) candidate draw per part-1
    vertex against the per-pair ratio (cheap when the realised weights are not
    too spread out), or sample each row of Bernoullis directly; the choice is
    by expected cost, the sampled distribution is identical either way.
    """
    w1 = xi1.sample(rng, n1)
    w2 = xi2.sample(rng, n2)
    norm = math.sqrt(n1 * n2)
    w2max = float(w2.max()) if n2 else 0.0
    pmax = np.minimum(w1 * w2max / norm, 1.0)
    pairs: list[tuple[int, int]] = []
    # thinning pays off while the candidate draws stay well below the full grid
    if float(pmax.sum()) * n2 <= 0.05 * n1 * n2:
        for v in range(n1):
            pv = float(pmax[v])
            if pv <= 0.0:
                continue
            k = int(rng.binomial(n2, pv))
            if k == 0:
                continue
            cand = _floyd_subset(rng, n2, k)
            keep = rng.random(k) * pv <= np.minimum(w1[v] * w2[np.asarray(cand)] / norm, 1.0)
            pairs.extend((v, cand[i]) for i in np.flatnonzero(keep))
    else:
        for v in range(n1):
            row = np.minimum(w1[v] * w2 / norm, 1.0)
            hits = np.flatnonzero(rng.random(n2) < row)
            pairs.extend((v, int(w)) for w in hits)
    return BipartiteMultigraph.from_pairs(n1, n2, pairs)


def gen_configuration(
    d1: Sequence[int], d2: Sequence[int], rng: np.random.Generator
) -> BipartiteMultigraph:
    """Uniform perfect matching between part-1 and part-2 half-edges."""
    d1 = np.asarray(d1, dtype=np.int64)
    d2 = np.asarray(d2, dtype=np.int64)
    if d1.size and d1.min() < 0 or d2.size and d2.min() < 0:
        raise ValueError("degrees must be non-negative")
    if int(d1.sum()) != int(d2.sum()):
        raise ValueError(f"degree sums differ: {int(d1.sum())} vs {int(d2.sum())}")
    stubs1 = np.repeat(np.arange(d1.size), d1)
    stubs2 = np.repeat(np.arange(d2.size), d2)
    stubs2 = stubs2[rng.permutation(stubs2.size)]
    return BipartiteMultigraph.from_pairs(d1.size, d2.size, zip(stubs1.tolist(), stubs2.tolist()))


def gen_degree_sequences(
    n1: int,
    D1: DegreeLaw,
    D2: DegreeLaw,
    rng: np.random.Generator,
    beta: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw degree sequences realising (D1, D2) in the configuration model.

    n2 = floor(beta * n1) with beta = E D1 / E D2 (the ratio the construction
    requires; an explicit ``beta`` is accepted but must match).  Each side is
    n_i iid draws plus one appended balancing term equal to the other side's
    surplus, so the sums match exactly and at most one appended term is
    non-zero.
    """
    derived = float(D1.mean()) / float(D2.mean())
    if beta is not None and not math.isclose(beta, derived, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(
            f"beta={beta} inconsistent with E D1 / E D2 = {derived}; "
            "the balanced construction requires them equal"
        )
    n2 = int(math.floor(derived * n1))
    if n1 < 1 or n2 < 1:
        raise ValueError("need n1 >= 1 and floor(beta * n1) >= 1")
    d1 = D1.sample(rng, n1)
    d2 = D2.sample(rng, n2)
    s1, s2 = int(d1.sum()), int(d2.sum())
    d1 = np.append(d1, max(s2 - s1, 0))
    d2 = np.append(d2, max(s1 - s2, 0))
    return d1, d2


def plant_clique(G: Graph, s: int, rng: np.random.Generator) -> Graph:
    """Union of E(G) with all pairs of a uniformly random s-subset of vertices."""
    if not 1 <= s <= G.vertex_count:
        raise ValueError("clique size out of range")
    members = np.sort(rng.choice(G.vertex_count, size=s, replace=False))
    iu, jv = np.triu_indices(s, k=1)
    src = np.repeat(np.arange(G.vertex_count), np.diff(G.indptr))
    keep = src < G.indices
    edges = np.concatenate(
        [np.stack([src[keep], G.indices[keep]], axis=1), np.stack([members[iu], members[jv]], axis=1)]
    )
    return Graph.from_edges(G.vertex_count, edges)


# -- model configuration --------------------------------------------------------


@dataclass(frozen=True)
class ModelConfig:
    """One of the four bipartite models plus its laws and sizes.

    model: 'active' | 'passive' | 'inhomogeneous' | 'configuration'
    - active/passive carry P (finite support, within the opposite part size)
    - inhomogeneous carries xi1, xi2
    - configuration carries D1, D2 (degree sequences are synthesised via
      gen_degree_sequences, so n2 is derived from E D1 / E D2)
    """

    model: str
    n1: int
    n2: int
    P: DegreeLaw | None = None
    xi1: WeightLaw | None = None
    xi2: WeightLaw | None = None
    D1: DegreeLaw | None = None
    D2: DegreeLaw | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.model not in ("active", "passive", "inhomogeneous", "configuration"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("part sizes must be >= 1")
        if self.model in ("active", "passive"):
            if self.P is None:
                raise ValueError(f"{self.model} model needs P")
            cap = self.n2 if self.model == "active" else self.n1
            mx = self.P.max_support()
            if mx is None or mx > cap:
                raise ValueError(
                    f"P support must lie in {{0,..,{cap}}} for the {self.model} model"
                )
        if self.model == "inhomogeneous" and (self.xi1 is None or self.xi2 is None):
            raise ValueError("inhomogeneous model needs xi1 and xi2")
        if self.model == "configuration" and (self.D1 is None or self.D2 is None):
            raise ValueError("configuration model needs D1 and D2")

    @property
    def beta(self) -> float:
        return self.n2 / self.n1

    def with_sizes(self, n1: int, n2: int) -> "ModelConfig":
        return ModelConfig(self.model, n1, n2, self.P, self.xi1, self.xi2, self.D1, self.D2, self.seed)

    @staticmethod
    def from_config(cfg: Mapping) -> "ModelConfig":
        model = cfg["model"]
        kw = dict(model=model, n1=int(cfg["n1"]), n2=int(cfg.get("n2", 0)), seed=int(cfg.get("seed", 0)))
        if model in ("active", "passive"):
            kw["P"] = degree_law_from_config(cfg["P"])
        elif model == "inhomogeneous":
            kw["xi1"] = weight_law_from_config(cfg["xi1"])
            kw["xi2"] = weight_law_from_config(cfg["xi2"])
        elif model == "configuration":
            kw["D1"] = degree_law_from_config(cfg["D1"])
            kw["D2"] = degree_law_from_config(cfg["D2"])
            if not kw["n2"]:
                kw["n2"] = int(math.floor(float(kw["D1"].mean()) / float(kw["D2"].mean()) * kw["n1"]))
        if not kw["n2"]:
            raise ValueError("n2 required")
        return ModelConfig(**kw)


def generate_bipartite(config: ModelConfig, rng: np.random.Generator) -> BipartiteMultigraph:
    """Sample the bipartite graph H_n for a model configuration."""
    if config.model == "active":
        return gen_active(config.n1, config.n2, config.P, rng)
    if config.model == "passive":
        return gen_passive(config.n1, config.n2, config.P, rng)
    if config.model == "inhomogeneous":
        return gen_inhomogeneous(config.n1, config.n2, config.xi1, config.xi2, rng)
    d1, d2 = gen_degree_sequences(config.n1, config.D1, config.D2, rng)
    return gen_configuration(d1, d2, rng)
