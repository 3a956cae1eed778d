"""Degree and weight laws: sampling, pmf queries, exact moments, size-biasing.

Degree laws cover the four variants the models need: finite pmf, Poisson,
mixed Poisson (weight-randomised rate), and integer shifts of those.  Finite
pmf laws keep their probabilities as ``Fraction``s so moment identities can be
checked exactly; Poisson-family moments use the closed forms (factorial
moments of Po(lam) are lam^k, of a mixed Poisson the raw weight moments).

Size-biasing reweights P(Z=k) by k/E[Z].  For Poisson and mixed-Poisson laws
the size-biased law is the weight-size-biased law plus one, which is what
keeps the whole family closed under the operations the branching process
needs: the offspring law ``size_biased(D) - 1`` of a Poisson stays Poisson,
of a mixed Poisson stays mixed Poisson.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

__all__ = [
    "MomentUnavailable",
    "WeightLaw",
    "DegreeLaw",
    "size_biased",
    "offspring_law",
    "degree_law_from_config",
    "weight_law_from_config",
]


class MomentUnavailable(ValueError):
    """Raised when a requested moment is infinite or has no computable form."""


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling numbers of the second kind."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def stirling1_signed(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind: (x)_n = sum_k s(n,k) x^k."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return stirling1_signed(n - 1, k - 1) - (n - 1) * stirling1_signed(n - 1, k)


# -- weight laws ----------------------------------------------------------------


@dataclass(frozen=True)
class WeightLaw:
    """Non-negative real law for vertex weights.

    Kinds: ``point`` (mass at c), ``finite`` (finite support), ``gamma``
    (shape/rate; exponential(rate) is gamma with shape 1), ``pareto``
    (shape/scale, density a m^a x^(-a-1) on [m, inf)).  The family is closed
    under size-biasing (gamma -> shape+1, pareto -> shape-1) and scaling.
    """

    kind: str
    values: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()
    shape: float = 0.0
    rate: float = 0.0
    scale: float = 0.0

    @staticmethod
    def point(c: float) -> "WeightLaw":
        if c < 0:
            raise ValueError("weights must be non-negative")
        return WeightLaw("point", values=(float(c),))

    @staticmethod
    def finite(values: Sequence[float], probs: Sequence[float]) -> "WeightLaw":
        values = tuple(float(v) for v in values)
        probs = tuple(float(p) for p in probs)
        if len(values) != len(probs) or not values:
            raise ValueError("values and probs must be equal-length and non-empty")
        if min(values) < 0 or min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("invalid finite weight law")
        return WeightLaw("finite", values=values, probs=probs)

    @staticmethod
    def exponential(rate: float) -> "WeightLaw":
        if rate <= 0:
            raise ValueError("rate must be positive")
        return WeightLaw("gamma", shape=1.0, rate=float(rate))

    @staticmethod
    def gamma(shape: float, rate: float) -> "WeightLaw":
        if shape <= 0 or rate <= 0:
            raise ValueError("shape and rate must be positive")
        return WeightLaw("gamma", shape=float(shape), rate=float(rate))

    @staticmethod
    def pareto(shape: float, scale: float) -> "WeightLaw":
        if shape <= 1 or scale <= 0:
            raise ValueError("pareto weight needs shape > 1 (finite mean) and scale > 0")
        return WeightLaw("pareto", shape=float(shape), scale=float(scale))

    def moment(self, k: int) -> float:
        """Raw moment E X^k; raises MomentUnavailable when infinite."""
        if k == 0:
            return 1.0
        if self.kind == "point":
            return self.values[0] ** k
        if self.kind == "finite":
            return float(sum(p * v**k for v, p in zip(self.values, self.probs)))
        if self.kind == "gamma":
            out = 1.0
            for i in range(k):
                out *= (self.shape + i) / self.rate
            return out
        if self.kind == "pareto":
            if k >= self.shape:
                raise MomentUnavailable(f"pareto moment of order {k} is infinite (shape {self.shape})")
            return self.shape * self.scale**k / (self.shape - k)
        raise AssertionError(self.kind)

    def mean(self) -> float:
        return self.moment(1)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "point":
            return np.full(size, self.values[0])
        if self.kind == "finite":
            idx = rng.choice(len(self.values), size=size, p=np.asarray(self.probs) / sum(self.probs))
            return np.asarray(self.values)[idx]
        if self.kind == "gamma":
            return rng.gamma(self.shape, 1.0 / self.rate, size=size)
        if self.kind == "pareto":
            u = rng.random(size)
            return self.scale * (1.0 - u) ** (-1.0 / self.shape)
        raise AssertionError(self.kind)

    def size_biased(self) -> "WeightLaw":
        if self.kind == "point":
            if self.values[0] <= 0:
                raise ValueError("cannot size-bias a zero weight")
            return self
        if self.kind == "finite":
            m = self.mean()
            if m <= 0:
                raise ValueError("cannot size-bias a zero-mean weight law")
            pairs = [(v, p * v / m) for v, p in zip(self.values, self.probs) if v > 0]
            return WeightLaw.finite([v for v, _ in pairs], [p for _, p in pairs])
        if self.kind == "gamma":
            return WeightLaw.gamma(self.shape + 1.0, self.rate)
        if self.kind == "pareto":
            # density x * a m^a x^(-a-1) / mean = (a-1) m^(a-1) x^(-a): pareto(a-1, m)
            return WeightLaw("pareto", shape=self.shape - 1.0, scale=self.scale)
        raise AssertionError(self.kind)

    def scaled(self, c: float) -> "WeightLaw":
        """Law of c * X for c > 0."""
        if c <= 0:
            raise ValueError("scale factor must be positive")
        if self.kind == "point":
            return WeightLaw.point(c * self.values[0])
        if self.kind == "finite":
            return WeightLaw.finite([c * v for v in self.values], self.probs)
        if self.kind == "gamma":
            return WeightLaw("gamma", shape=self.shape, rate=self.rate / c)
        if self.kind == "pareto":
            return WeightLaw("pareto", shape=self.shape, scale=c * self.scale)
        raise AssertionError(self.kind)


# -- degree laws ------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeLaw:
    """Discrete law on {0, 1, 2, ...}.

    Kinds: ``finite`` (values/probs, probs kept exact as Fractions),
    ``poisson`` (lam), ``mixed`` (Poisson with random rate ~ weight),
    ``shifted`` (base + integer offset).
    """

    kind: str
    values: tuple[int, ...] = ()
    probs: tuple[Fraction, ...] = ()
    lam: float = 0.0
    weight: WeightLaw | None = None
    base: "DegreeLaw | None" = None
    offset: int = 0

    # constructors ---------------------------------------------------------

    @staticmethod
    def from_pmf(pmf: Mapping[int, float | Fraction]) -> "DegreeLaw":
        items = sorted((int(v), Fraction(p)) for v, p in pmf.items())
        if not items:
            raise ValueError("empty pmf")
        values = tuple(v for v, _ in items)
        probs = tuple(p for _, p in items)
        if min(values) < 0:
            raise ValueError("degree values must be non-negative integers")
        if any(p < 0 for p in probs) or abs(float(sum(probs)) - 1.0) > 1e-12:
            raise ValueError("pmf must be non-negative and sum to 1 (within 1e-12)")
        return DegreeLaw("finite", values=values, probs=probs)

    @staticmethod
    def constant(c: int) -> "DegreeLaw":
        return DegreeLaw.from_pmf({int(c): 1})

    @staticmethod
    def poisson(lam: float) -> "DegreeLaw":
        if lam <= 0:
            raise ValueError("poisson rate must be positive")
        return DegreeLaw("poisson", lam=float(lam))

    @staticmethod
    def mixed_poisson(weight: WeightLaw) -> "DegreeLaw":
        if weight.mean() <= 0:
            raise ValueError("mixed-Poisson weight must have positive mean")
        return DegreeLaw("mixed", weight=weight)

    @staticmethod
    def shifted(base: "DegreeLaw", offset: int) -> "DegreeLaw":
        if offset + base.min_support() < 0:
            raise ValueError("shift would create negative support")
        return DegreeLaw("shifted", base=base, offset=int(offset))

    # support ----------------------------------------------------------------

    def min_support(self) -> int:
        if self.kind == "finite":
            return self.values[0]
        if self.kind in ("poisson", "mixed"):
            return 0
        return self.base.min_support() + self.offset

    def max_support(self) -> int | None:
        """Largest support point, or None when unbounded."""
        if self.kind == "finite":
            return self.values[-1]
        if self.kind in ("poisson", "mixed"):
            return None
        m = self.base.max_support()
        return None if m is None else m + self.offset

    def has_finite_support(self) -> bool:
        return self.max_support() is not None

    def as_finite(self) -> "DegreeLaw":
        """Materialize a finite-support law as kind 'finite'."""
        if self.kind == "finite":
            return self
        if self.kind == "shifted" and self.base.has_finite_support():
            b = self.base.as_finite()
            return DegreeLaw.from_pmf({v + self.offset: p for v, p in zip(b.values, b.probs)})
        raise ValueError("law does not have finite support")

    # moments ----------------------------------------------------------------

    def mean(self) -> float | Fraction:
        return self.raw_moment(1)

    def raw_moment(self, k: int) -> float | Fraction:
        """E X^k (exact Fraction for finite pmf laws)."""
        if k == 0:
            return Fraction(1)
        if self.kind == "finite":
            return sum(p * v**k for v, p in zip(self.values, self.probs))
        if self.kind == "poisson":
            return float(sum(stirling2(k, j) * self.lam**j for j in range(1, k + 1)))
        if self.kind == "mixed":
            return float(sum(stirling2(k, j) * self.weight.moment(j) for j in range(1, k + 1)))
        if self.kind == "shifted":
            c = self.offset
            return sum(math.comb(k, j) * c ** (k - j) * self.base.raw_moment(j) for j in range(k + 1))
        raise AssertionError(self.kind)

    def factorial_moment(self, k: int) -> float | Fraction:
        """E (X)_k = E X(X-1)...(X-k+1)."""
        if k == 0:
            return Fraction(1)
        if self.kind == "finite":
            return sum(p * math.prod(v - i for i in range(k)) for v, p in zip(self.values, self.probs))
        if self.kind == "poisson":
            return self.lam**k
        if self.kind == "mixed":
            return self.weight.moment(k)
        # generic: (x)_k = sum_j s(k,j) x^j
        return sum(stirling1_signed(k, j) * self.raw_moment(j) for j in range(k + 1))

    # pmf / tails -------------------------------------------------------------

    def pmf(self, k: int) -> float:
        if k < 0:
            return 0.0
        if self.kind == "finite":
            try:
                return float(self.probs[self.values.index(k)])
            except ValueError:
                return 0.0
        if self.kind == "poisson":
            return float(stats.poisson.pmf(k, self.lam))
        if self.kind == "mixed":
            w = self.weight
            if w.kind == "point":
                return float(stats.poisson.pmf(k, w.values[0])) if w.values[0] > 0 else float(k == 0)
            if w.kind == "finite":
                return float(sum(p * (stats.poisson.pmf(k, v) if v > 0 else (k == 0)) for v, p in zip(w.values, w.probs)))
            if w.kind == "gamma":
                # Poisson mixed over gamma(shape, rate) is negative binomial
                return float(stats.nbinom.pmf(k, w.shape, w.rate / (1.0 + w.rate)))
            raise MomentUnavailable("pmf has no closed form for this mixed-Poisson weight; use Monte Carlo")
        if self.kind == "shifted":
            return self.base.pmf(k - self.offset)
        raise AssertionError(self.kind)

    def tail_mass(self, k: int) -> float:
        """Upper bound on P(X > k), exact for the supported closed forms."""
        if self.kind == "finite":
            return float(sum(p for v, p in zip(self.values, self.probs) if v > k))
        if self.kind == "poisson":
            return float(stats.poisson.sf(k, self.lam))
        if self.kind == "mixed":
            w = self.weight
            if w.kind == "point":
                return float(stats.poisson.sf(k, w.values[0])) if w.values[0] > 0 else 0.0
            if w.kind == "finite":
                return float(sum(p * stats.poisson.sf(k, v) for v, p in zip(w.values, w.probs) if v > 0))
            if w.kind == "gamma":
                return float(stats.nbinom.sf(k, w.shape, w.rate / (1.0 + w.rate)))
            raise MomentUnavailable("no certified tail bound for this mixed-Poisson weight")
        if self.kind == "shifted":
            return self.base.tail_mass(k - self.offset)
        raise AssertionError(self.kind)

    def pmf_vector(self, kmax: int) -> np.ndarray:
        """pmf on 0..kmax as a float vector."""
        return np.array([self.pmf(k) for k in range(kmax + 1)])

    # sampling ------------------------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "finite":
            p = np.asarray([float(q) for q in self.probs])
            idx = rng.choice(len(self.values), size=size, p=p / p.sum())
            return np.asarray(self.values, dtype=np.int64)[idx]
        if self.kind == "poisson":
            return rng.poisson(self.lam, size=size).astype(np.int64)
        if self.kind == "mixed":
            w = self.weight.sample(rng, size)
            return rng.poisson(w).astype(np.int64)
        if self.kind == "shifted":
            return self.base.sample(rng, size) + self.offset
        raise AssertionError(self.kind)


def size_biased(law: DegreeLaw) -> DegreeLaw:
    """Size-biased law: P(Z* = k) proportional to k P(Z = k).

    Poisson and mixed-Poisson laws use the exact identity
    ``Po(W)* = Po(W*) + 1``; finite laws are reweighted exactly.
    """
    if law.kind == "finite":
        m = law.mean()
        if m <= 0:
            raise ValueError("cannot size-bias a zero-mean law")
        return DegreeLaw.from_pmf({v: p * v / m for v, p in zip(law.values, law.probs) if v > 0})
    if law.kind == "poisson":
        return DegreeLaw.shifted(DegreeLaw.poisson(law.lam), +1)
    if law.kind == "mixed":
        return DegreeLaw.shifted(DegreeLaw.mixed_poisson(law.weight.size_biased()), +1)
    if law.kind == "shifted" and law.has_finite_support():
        return size_biased(law.as_finite())
    raise ValueError(f"size-biasing not supported for {law.kind} law")


def offspring_law(law: DegreeLaw) -> DegreeLaw:
    """Offspring law of the branching process: size_biased(law) - 1."""
    sb = size_biased(law)
    if sb.kind == "shifted" and sb.offset == 1:
        return sb.base
    if sb.kind == "finite":
        return DegreeLaw.from_pmf({v - 1: p for v, p in zip(sb.values, sb.probs)})
    return DegreeLaw.shifted(sb, -1)


# -- config parsing (used by the CLI and experiment plans) ----------------------


def weight_law_from_config(cfg: Mapping) -> WeightLaw:
    kind = cfg["kind"]
    if kind == "point":
        return WeightLaw.point(cfg["value"])
    if kind == "finite":
        return WeightLaw.finite(cfg["values"], cfg["probs"])
    if kind == "exponential":
        return WeightLaw.exponential(cfg["rate"])
    if kind == "gamma":
        return WeightLaw.gamma(cfg["shape"], cfg["rate"])
    if kind == "pareto":
        return WeightLaw.pareto(cfg["shape"], cfg["scale"])
    raise ValueError(f"unknown weight law kind: {kind!r}")


def degree_law_from_config(cfg: Mapping) -> DegreeLaw:
    kind = cfg["kind"]
    if kind == "pmf":
        return DegreeLaw.from_pmf({int(k): v for k, v in cfg["pmf"].items()})
    if kind == "constant":
        return DegreeLaw.constant(cfg["value"])
    if kind == "poisson":
        return DegreeLaw.poisson(cfg["lam"])
    if kind == "mixed_poisson":
        return DegreeLaw.mixed_poisson(weight_law_from_config(cfg["weight"]))
    raise ValueError(f"unknown degree law kind: {kind!r}")
