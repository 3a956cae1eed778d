"""Closed-form and Monte Carlo evaluation of the limit quantities.

Everything is driven by a ``LimitSpec`` holding the two degree laws (D1, D2)
of the branching process, usually obtained from a model via the Poisson
identifications (active: D2 ~ Po(E D1 / beta); passive: D1 ~ Po(beta E D2);
inhomogeneous: both mixed Poisson in the scaled weights).  The root degree of
the clique tree is d* = sum_{i=1}^{D1} Z_i with Z_i iid distributed as the
size-biased D2 minus one, and all closed forms reduce to moments of D1 and Z:

* E Z^k   = E (D2-1)^k D2 / E D2,   E (Z)_k = E (D2)_{k+1} / E D2
* E (d*)^k = sum over compositions (k_1..k_j) of k of
             multinomial(k; k_1..k_j) E binom(D1, j) prod_i E Z^{k_i}
* clustering limit  a / (a + b), a = E D1 E D2 E (D2)_3,
                    b = E (D1)_2 (E (D2)_2)^2
* assortativity limit (E d* E hom'(P4') - (E (d*)^2)^2)
                    / (E d* E (d*)^3 - (E (d*)^2)^2) with
  E hom'(P4') = E D1 E Z^3 + E (D1)_2 E Z E Z^2
                + (E (D1)_2 / E D1) E (d*)^2 E Z

Degree-conditioned quantities (conditional clustering / assortativity) are
evaluated exactly by truncated convolution of the Z pmf whenever the pmfs are
available (with a certified D1 tail deficit), by the Poisson shortcut
lam P(d*=k-1) / (k P(d*=k)) when D2 is Poisson, or by rejection Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .cliquetree import sample_clique_tree_ball
from .counting import Pattern, rooted_emb_count
from .generators import ModelConfig
from .laws import DegreeLaw, MomentUnavailable, WeightLaw, offspring_law

__all__ = [
    "LimitSpec",
    "Estimate",
    "remark1_limits",
    "limit_spec_for",
    "z_moment",
    "dstar_moment",
    "sample_dstar",
    "limit_degree_pmf",
    "limit_degree_pmf_vector",
    "limit_clustering",
    "limit_assortativity",
    "limit_conditional_clustering",
    "limit_conditional_assortativity",
    "rooted_emb_expectation_mc",
]

_TAIL_EPS = 1e-12


@dataclass(frozen=True)
class Estimate:
    """A limit value: exact closed form (stderr 0) or Monte Carlo.

    Exact estimates always carry stderr 0.  A Monte Carlo estimate may also
    report stderr 0 when every sampled value coincided (degenerate laws)."""

    value: float
    stderr: float = 0.0
    samples: int = 0
    exact: bool = True
    deficit: float = 0.0  # certified truncation deficit of an exact evaluation
    degenerate: bool = False

    def __post_init__(self) -> None:
        assert not (self.exact and self.stderr != 0.0), "exact estimates have stderr 0"


@dataclass(frozen=True)
class LimitSpec:
    """Branching-process laws (D1, D2) plus how they were identified."""

    D1: DegreeLaw
    D2: DegreeLaw
    provenance: str = "direct"
    beta: float | None = None

    def __post_init__(self) -> None:
        m1, m2 = float(self.D1.mean()), float(self.D2.mean())
        if not (0 <= m1 < math.inf and 0 <= m2 < math.inf):
            raise ValueError("E D1 and E D2 must be finite and non-negative")
        if m1 > 0 and m2 <= 0:
            # with a childless root D2 never enters; otherwise it must be usable
            raise ValueError("E D2 must be positive when E D1 > 0")
        if self.provenance.startswith("remark1"):
            if self.beta is None:
                raise ValueError("remark1 provenance needs beta")
            if abs(self.beta * m2 - m1) > 1e-9 * max(1.0, m1):
                raise ValueError("identification violated: beta E D2 must equal E D1")

    @property
    def degenerate_root(self) -> bool:
        """True when E D1 = 0, i.e. d* = 0 almost surely."""
        return float(self.D1.mean()) == 0.0

    @property
    def Z(self) -> DegreeLaw:
        return offspring_law(self.D2)


def remark1_limits(model: str, beta: float, P: DegreeLaw | None = None,
                   xi1: WeightLaw | None = None, xi2: WeightLaw | None = None) -> LimitSpec:
    """Limit laws for the active / passive / inhomogeneous models.

    active: D1 = P and D2 ~ Po(E P / beta); passive: D2 = P and
    D1 ~ Po(beta E P); inhomogeneous: D1 ~ Po(sqrt(beta) xi1 E xi2) and
    D2 ~ Po(xi2 E xi1 / sqrt(beta)), i.e. mixed Poisson in the scaled weights.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if model == "active":
        if P is None:
            raise ValueError("active model needs P")
        lam = float(P.mean()) / beta
        D2 = DegreeLaw.poisson(lam) if lam > 0 else DegreeLaw.constant(0)  # Po(0) = point mass 0
        return LimitSpec(P, D2, "remark1-active", beta)
    if model == "passive":
        if P is None:
            raise ValueError("passive model needs P")
        lam = beta * float(P.mean())
        D1 = DegreeLaw.poisson(lam) if lam > 0 else DegreeLaw.constant(0)
        return LimitSpec(D1, P, "remark1-passive", beta)
    if model == "inhomogeneous":
        if xi1 is None or xi2 is None:
            raise ValueError("inhomogeneous model needs xi1 and xi2")
        w1 = xi1.scaled(math.sqrt(beta) * xi2.mean())
        w2 = xi2.scaled(xi1.mean() / math.sqrt(beta))
        return LimitSpec(
            DegreeLaw.mixed_poisson(w1), DegreeLaw.mixed_poisson(w2), "remark1-inhomogeneous", beta
        )
    raise ValueError(f"remark1_limits does not apply to model {model!r}")


def limit_spec_for(config: ModelConfig) -> LimitSpec:
    """LimitSpec of a model configuration (configuration model: direct laws)."""
    if config.model == "configuration":
        return LimitSpec(config.D1, config.D2, "direct", config.beta)
    return remark1_limits(config.model, config.beta, P=config.P, xi1=config.xi1, xi2=config.xi2)


# -- moments ---------------------------------------------------------------------


def z_moment(
    D2: DegreeLaw,
    j: int,
    mode: str = "raw",
    mc_samples: int = 0,
    rng: np.random.Generator | None = None,
) -> Estimate:
    """Moments of Z ~ size_biased(D2) - 1.

    raw:       E Z^j = E (D2 - 1)^j D2 / E D2
    factorial: E (Z)_j = E (D2)_{j+1} / E D2
    Falls back to Monte Carlo over sampled Z when a required D2 moment is
    unavailable and ``mc_samples`` is set.
    """
    if j < 0:
        raise ValueError("moment order must be non-negative")
    try:
        m = float(D2.mean())
        if mode == "factorial":
            val = float(D2.factorial_moment(j + 1)) / m
        elif mode == "raw":
            total = 0.0
            for i in range(j + 1):
                total += math.comb(j, i) * (-1) ** (j - i) * float(D2.raw_moment(i + 1))
            val = total / m
        else:
            raise ValueError(f"unknown mode {mode!r}")
        return Estimate(val)
    except MomentUnavailable:
        if mc_samples <= 0 or rng is None:
            raise
    zs = offspring_law(D2).sample(rng, mc_samples).astype(np.float64)
    x = zs**j if mode == "raw" else np.prod([zs - i for i in range(j)], axis=0)
    return Estimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(mc_samples)), mc_samples, exact=False)


def _compositions(k: int) -> Iterable[tuple[int, ...]]:
    """Ordered tuples of positive integers summing to k."""
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        for rest in _compositions(k - first):
            yield (first,) + rest


def dstar_moment(spec: LimitSpec, k: int, mc_samples: int = 0, rng: np.random.Generator | None = None) -> Estimate:
    """E (d*)^k via the composition expansion over E binom(D1, j) and E Z^k_i."""
    if k < 1:
        raise ValueError("moment order must be >= 1")
    if spec.degenerate_root:
        return Estimate(0.0)
    try:
        zraw = [z_moment(spec.D2, j).value for j in range(k + 1)]
        total = 0.0
        for parts in _compositions(k):
            j = len(parts)
            multinom = math.factorial(k)
            for p in parts:
                multinom //= math.factorial(p)
            ed1j = float(spec.D1.factorial_moment(j)) / math.factorial(j)
            if ed1j == 0.0:
                continue
            prod = 1.0
            for p in parts:
                prod *= zraw[p]
            total += multinom * ed1j * prod
        return Estimate(total)
    except MomentUnavailable:
        if mc_samples <= 0 or rng is None:
            raise
    d = sample_dstar(spec, mc_samples, rng).astype(np.float64) ** k
    return Estimate(float(d.mean()), float(d.std(ddof=1) / math.sqrt(mc_samples)), mc_samples, exact=False)


def sample_dstar(spec: LimitSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """iid samples of d* = sum_{i<=D1} Z_i (vectorized)."""
    d1 = spec.D1.sample(rng, size)
    total = int(d1.sum())
    if total == 0:
        return np.zeros(size, dtype=np.int64)
    zs = spec.Z.sample(rng, total)
    out = np.zeros(size, dtype=np.int64)
    idx = np.flatnonzero(d1)
    ends = np.cumsum(d1)
    starts = ends - d1
    sums = np.add.reduceat(zs, starts[idx])
    out[idx] = sums
    return out


# -- degree pmf -------------------------------------------------------------------


def _z_pmf_vector(spec: LimitSpec, kmax: int) -> np.ndarray:
    """pmf of Z on 0..kmax: P(Z = m) = (m+1) P(D2 = m+1) / E D2."""
    m2 = float(spec.D2.mean())
    return np.array([(m + 1) * spec.D2.pmf(m + 1) / m2 for m in range(kmax + 1)])


def _d1_truncation(D1: DegreeLaw, eps: float = _TAIL_EPS) -> tuple[np.ndarray, float]:
    """(pmf of D1 on 0..N, tail deficit <= eps) with certified N."""
    mx = D1.max_support()
    if mx is not None:
        return D1.pmf_vector(mx), 0.0
    n = 16
    while D1.tail_mass(n) > eps:
        n *= 2
        if n > 10**7:
            raise MomentUnavailable("cannot certify a D1 truncation point")
    return D1.pmf_vector(n), float(D1.tail_mass(n))


def limit_degree_pmf_vector(spec: LimitSpec, kmax: int) -> tuple[np.ndarray, float]:
    """Exact (certified-truncation) pmf of d* on 0..kmax plus the deficit.

    Convolutions truncated at kmax are exact for the masses below kmax; the
    only error is the D1 tail deficit, which is certified below 1e-12.
    Raises MomentUnavailable when the needed pmfs have no closed form.
    """
    if spec.degenerate_root:
        out = np.zeros(kmax + 1)
        out[0] = 1.0
        return out, 0.0
    z = _z_pmf_vector(spec, kmax)
    d1p, deficit = _d1_truncation(spec.D1)
    out = np.zeros(kmax + 1)
    conv = np.zeros(kmax + 1)
    conv[0] = 1.0  # sum of zero Z's
    for n, pn in enumerate(d1p):
        if n > 0:
            conv = np.convolve(conv, z)[: kmax + 1]
        if pn > 0:
            out += pn * conv
    return out, deficit


def limit_degree_pmf(
    spec: LimitSpec,
    k: int,
    mc_samples: int = 0,
    rng: np.random.Generator | None = None,
) -> Estimate:
    """P(d* = k): exact truncated convolution when pmfs exist, else MC."""
    if k < 0:
        raise ValueError("k must be non-negative")
    try:
        vec, deficit = limit_degree_pmf_vector(spec, k)
        return Estimate(float(vec[k]), deficit=deficit)
    except MomentUnavailable:
        if mc_samples <= 0 or rng is None:
            raise
    d = sample_dstar(spec, mc_samples, rng)
    p = float((d == k).mean())
    return Estimate(p, math.sqrt(max(p * (1 - p), 1e-300) / mc_samples), mc_samples, exact=False)


# -- headline statistics ------------------------------------------------------------


def limit_clustering(spec: LimitSpec) -> Estimate:
    """Limit clustering coefficient from factorial moments of D1, D2."""
    a = float(spec.D1.mean()) * float(spec.D2.mean()) * float(spec.D2.factorial_moment(3))
    b = float(spec.D1.factorial_moment(2)) * float(spec.D2.factorial_moment(2)) ** 2
    if a + b == 0.0:
        return Estimate(0.0, degenerate=True)
    val = a / (a + b)
    if spec.provenance == "remark1-active":
        simple = float(spec.D1.mean()) / float(spec.D1.raw_moment(2))
        if abs(val - simple) > 1e-9 * max(1.0, abs(simple)):
            raise AssertionError("active-model clustering simplification violated")
    return Estimate(val)


def limit_hom_p4_rooted(spec: LimitSpec) -> Estimate:
    """E hom'(P4 rooted at an inner vertex) at the clique-tree root."""
    ed1 = float(spec.D1.mean())
    ed1_2 = float(spec.D1.factorial_moment(2))
    z1 = z_moment(spec.D2, 1).value
    z2 = z_moment(spec.D2, 2).value
    z3 = z_moment(spec.D2, 3).value
    d2m = dstar_moment(spec, 2).value
    return Estimate(ed1 * z3 + ed1_2 * z1 * z2 + (ed1_2 / ed1) * d2m * z1)


def limit_assortativity(spec: LimitSpec) -> Estimate:
    """Limit assortativity; raises for degenerate (regular-limit) inputs."""
    d1m = dstar_moment(spec, 1).value
    d2m = dstar_moment(spec, 2).value
    d3m = dstar_moment(spec, 3).value
    var = d2m - d1m * d1m
    scale = max(1.0, d2m)
    if var <= 1e-12 * scale:
        raise ValueError("degenerate: regular limit (Var(d*) = 0)")
    den = d1m * d3m - d2m * d2m
    if abs(den) <= 1e-12 * max(1.0, d1m * d3m):
        raise ValueError("degenerate: assortativity denominator vanishes")
    num = d1m * limit_hom_p4_rooted(spec).value - d2m * d2m
    return Estimate(num / den)


# -- conditional statistics -----------------------------------------------------------


def _conditional_expectation(
    spec: LimitSpec, k: int, weight: Callable[[int], float]
) -> tuple[float, float, float]:
    """(E[sum_i w(Z_i); d* = k], P(d* = k), deficit), exactly via truncated
    convolutions of the Z pmf (certified D1 truncation)."""
    z = _z_pmf_vector(spec, k)
    d1p, deficit = _d1_truncation(spec.D1)
    w = np.array([weight(m) for m in range(k + 1)])
    wz = w * z
    num = 0.0
    pk = 0.0
    conv_prev = None  # pmf of (n-1)-fold sum
    conv = np.zeros(k + 1)
    conv[0] = 1.0
    for n, pn in enumerate(d1p):
        if n > 0:
            conv_prev, conv = conv, np.convolve(conv, z)[: k + 1]
        if pn > 0:
            pk += pn * conv[k]
            if n > 0:
                # symmetry: n identical terms, condition through the (n-1)-fold sum
                num += pn * n * float(np.dot(wz, conv_prev[k::-1]))
    return num, pk, deficit


def _conditional_mc(
    spec: LimitSpec,
    k: int,
    weight: Callable[[np.ndarray], np.ndarray],
    mc_samples: int,
    rng: np.random.Generator,
) -> Estimate:
    """Rejection Monte Carlo for E[sum_i w(Z_i) | d* = k]."""
    accepted: list[float] = []
    batch = max(10000, mc_samples // 10)
    drawn = 0
    while drawn < mc_samples:
        m = min(batch, mc_samples - drawn)
        drawn += m
        d1 = spec.D1.sample(rng, m)
        total = int(d1.sum())
        zs = spec.Z.sample(rng, total) if total else np.zeros(0, dtype=np.int64)
        ends = np.cumsum(d1)
        starts = ends - d1
        sums = np.zeros(m, dtype=np.int64)
        nz = np.flatnonzero(d1)
        if nz.size:
            sums[nz] = np.add.reduceat(zs, starts[nz])
        hits = np.flatnonzero(sums == k)
        wz = weight(zs.astype(np.float64))
        for i in hits:
            if d1[i] == 0:
                accepted.append(0.0)
            else:
                accepted.append(float(wz[starts[i] : ends[i]].sum()))
    if not accepted:
        raise RuntimeError(f"no Monte Carlo acceptances for d* = {k}; increase samples")
    arr = np.asarray(accepted)
    return Estimate(
        float(arr.mean()),
        float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else float("inf"),
        int(arr.size),
        exact=False,
    )


def _check_pk_positive(spec: LimitSpec, k: int, mc_samples: int, rng) -> None:
    pk = limit_degree_pmf(spec, k, mc_samples=mc_samples, rng=rng)
    if pk.value <= 0:
        raise ValueError(f"P(d* = {k}) = 0; conditional limit undefined")


def limit_conditional_clustering(
    spec: LimitSpec,
    k: int,
    mc_samples: int = 200_000,
    rng: np.random.Generator | None = None,
    method: str = "auto",
) -> Estimate:
    """Limit conditional clustering coefficient alpha_k*.

    methods: 'exact' (truncated convolution), 'poisson' (the shortcut
    lam P(d*=k-1) / (k P(d*=k)), valid when D2 is Poisson), 'mc'
    (rejection), 'auto' (exact if pmfs exist, else poisson, else mc).
    """
    if k < 2:
        raise ValueError("conditional clustering needs k >= 2")
    _check_pk_positive(spec, k, mc_samples, rng)
    if method == "auto":
        try:
            spec.D2.pmf(0)
            method = "exact"
        except MomentUnavailable:
            method = "poisson" if spec.D2.kind == "poisson" else "mc"
    if method == "exact":
        num, pk, deficit = _conditional_expectation(spec, k, lambda m: m * (m - 1))
        return Estimate(num / (k * (k - 1) * pk), deficit=deficit)
    if method == "poisson":
        if spec.D2.kind != "poisson":
            raise ValueError("the Poisson shortcut needs D2 ~ Poisson")
        lam = spec.D2.lam
        pk = limit_degree_pmf(spec, k).value
        pk1 = limit_degree_pmf(spec, k - 1).value
        return Estimate(lam * pk1 / (k * pk))
    if method == "mc":
        if rng is None:
            raise ValueError("Monte Carlo needs an rng")
        est = _conditional_mc(spec, k, lambda z: z * (z - 1), mc_samples, rng)
        scale = k * (k - 1)
        return Estimate(est.value / scale, est.stderr / scale, est.samples, exact=False)
    raise ValueError(f"unknown method {method!r}")


def limit_conditional_assortativity(
    spec: LimitSpec,
    k: int,
    mc_samples: int = 200_000,
    rng: np.random.Generator | None = None,
    method: str = "auto",
) -> Estimate:
    """Limit conditional assortativity r_k*: the conditional second-moment term
    plus the exact additive term E (D1)_2 E (D2)_2 / (E D1 E D2)."""
    if k < 1:
        raise ValueError("conditional assortativity needs k >= 1")
    _check_pk_positive(spec, k, mc_samples, rng)
    additive = (
        float(spec.D1.factorial_moment(2))
        * float(spec.D2.factorial_moment(2))
        / (float(spec.D1.mean()) * float(spec.D2.mean()))
    )
    if method == "auto":
        try:
            spec.D2.pmf(0)
            method = "exact"
        except MomentUnavailable:
            method = "mc"
    if method == "exact":
        num, pk, deficit = _conditional_expectation(spec, k, lambda m: m * m)
        return Estimate(num / (k * pk) + additive, deficit=deficit)
    if method == "mc":
        if rng is None:
            raise ValueError("Monte Carlo needs an rng")
        est = _conditional_mc(spec, k, lambda z: z * z, mc_samples, rng)
        return Estimate(est.value / k + additive, est.stderr / k, est.samples, exact=False)
    raise ValueError(f"unknown method {method!r}")


# -- rooted embedding expectations ------------------------------------------------------


def rooted_emb_expectation_mc(
    spec: LimitSpec,
    H: Pattern,
    r: int,
    samples: int,
    rng: np.random.Generator,
    hom_mode: bool = False,
) -> Estimate:
    """Monte Carlo E emb'(H, clique-tree ball, root) over sampled radius-r
    balls; requires the pattern radius to fit inside r."""
    if H.root is None:
        raise ValueError("pattern must be rooted")
    if H.root_eccentricity() > r:
        raise ValueError("ball radius too small for the pattern")
    counts = np.zeros(samples)
    memo: dict[tuple, int] = {}
    for i in range(samples):
        b = sample_clique_tree_ball(spec.D1, spec.D2, r, rng)
        g = b.rooted.graph
        key = (g.vertex_count, g.indptr.tobytes(), g.indices.tobytes())
        c = memo.get(key)
        if c is None:
            c = rooted_emb_count(H, g, 0, hom_mode=hom_mode)
            memo[key] = c
        counts[i] = c
    return Estimate(
        float(counts.mean()),
        float(counts.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf"),
        samples,
        exact=False,
    )
