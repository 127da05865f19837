"""Seeded generators for the four data generating distributions and their building blocks.

All randomness flows through an explicit ``numpy.random.Generator``. Streams are built on
the counter-based Philox bit generator. Scenario streams are children of the master seed
(``SeedSequence(master_seed, spawn_key=(index,))``), so every scenario owns an independent,
reproducible substream.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln, softmax

from ilr_approx.composition.composition import Composition


class Dgd(str, Enum):
    """Data generating distributions: fixed or Dirichlet probabilities, fixed or lognormal total."""

    MULTINOMIAL = "multinomial"
    DIRICHLET_MULTINOMIAL = "dirichlet_multinomial"
    LOGNORMAL_MULTINOMIAL = "lognormal_multinomial"
    LOGNORMAL_DIRICHLET_MULTINOMIAL = "lognormal_dirichlet_multinomial"

    @classmethod
    def parse(cls, value: Union[str, "Dgd"]) -> "Dgd":
        if isinstance(value, Dgd):
            return value
        key = str(value).strip().lower()
        if key in _DGD_LETTERS:
            return _DGD_LETTERS[key]
        return cls(key)

    @property
    def letter(self) -> str:
        return {v: k for k, v in _DGD_LETTERS.items()}[self]

    @property
    def short_name(self) -> str:
        return _DGD_SHORT_NAMES[self]

    @property
    def has_dirichlet(self) -> bool:
        return self in (Dgd.DIRICHLET_MULTINOMIAL, Dgd.LOGNORMAL_DIRICHLET_MULTINOMIAL)

    @property
    def has_lognormal_total(self) -> bool:
        return self in (Dgd.LOGNORMAL_MULTINOMIAL, Dgd.LOGNORMAL_DIRICHLET_MULTINOMIAL)


_DGD_LETTERS = {
    "a": Dgd.MULTINOMIAL,
    "b": Dgd.DIRICHLET_MULTINOMIAL,
    "c": Dgd.LOGNORMAL_MULTINOMIAL,
    "d": Dgd.LOGNORMAL_DIRICHLET_MULTINOMIAL,
}
_DGD_SHORT_NAMES = {
    Dgd.MULTINOMIAL: "Mn",
    Dgd.DIRICHLET_MULTINOMIAL: "Dir-Mn",
    Dgd.LOGNORMAL_MULTINOMIAL: "LN-Mn",
    Dgd.LOGNORMAL_DIRICHLET_MULTINOMIAL: "LN-Dir-Mn",
}


@dataclass(frozen=True, eq=False)
class DirichletSpec:
    """Dirichlet on the class probabilities, parametrised by its mean and concentration."""

    alpha_tilde: Composition
    alpha_s: float

    def __post_init__(self):
        if not np.isfinite(self.alpha_s) or self.alpha_s <= 0:
            raise ValueError(f"alpha_s must be positive, got {self.alpha_s}")
        object.__setattr__(self, "alpha_s", float(self.alpha_s))

    @property
    def alpha(self) -> np.ndarray:
        return self.alpha_s * self.alpha_tilde.parts

    @property
    def unimodal(self) -> bool:
        return bool(np.min(self.alpha) > 1.0)


@dataclass(frozen=True)
class FixedTotal:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"Fixed total must be a positive integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))


@dataclass(frozen=True)
class LognormalTotal:
    """Total count ``round(exp(N(mu, sigma_sq)))``; ``exp(mu)`` is the median."""

    mu: float
    sigma_sq: float

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ValueError("mu must be finite")
        if not np.isfinite(self.sigma_sq) or self.sigma_sq <= 0:
            raise ValueError(f"sigma_sq must be positive, got {self.sigma_sq}")

    @classmethod
    def from_median(cls, median: float, sigma_sq: float) -> "LognormalTotal":
        return cls(mu=float(np.log(median)), sigma_sq=float(sigma_sq))

    @property
    def median(self) -> float:
        return float(np.exp(self.mu))


TotalCountSpec = Union[FixedTotal, LognormalTotal]


@dataclass(frozen=True, eq=False)
class ModelSpec:
    dgd: Dgd
    probabilities: Union[Composition, DirichletSpec]
    total: TotalCountSpec

    def __post_init__(self):
        dgd = Dgd.parse(self.dgd)
        object.__setattr__(self, "dgd", dgd)
        if dgd.has_dirichlet != isinstance(self.probabilities, DirichletSpec):
            raise ValueError(f"{dgd.value} needs {'a DirichletSpec' if dgd.has_dirichlet else 'a fixed Composition'}")
        if dgd.has_lognormal_total != isinstance(self.total, LognormalTotal):
            raise ValueError(f"{dgd.value} needs {'a lognormal' if dgd.has_lognormal_total else 'a fixed'} total")

    @classmethod
    def multinomial(cls, p, k: int) -> "ModelSpec":
        return cls(Dgd.MULTINOMIAL, _as_composition(p), FixedTotal(k))

    @classmethod
    def dirichlet_multinomial(cls, alpha_tilde, alpha_s: float, k: int) -> "ModelSpec":
        return cls(Dgd.DIRICHLET_MULTINOMIAL, DirichletSpec(_as_composition(alpha_tilde), alpha_s), FixedTotal(k))

    @classmethod
    def lognormal_multinomial(cls, p, mu: float, sigma_sq: float) -> "ModelSpec":
        return cls(Dgd.LOGNORMAL_MULTINOMIAL, _as_composition(p), LognormalTotal(mu, sigma_sq))

    @classmethod
    def lognormal_dirichlet_multinomial(cls, alpha_tilde, alpha_s: float, mu: float, sigma_sq: float) -> "ModelSpec":
        return cls(
            Dgd.LOGNORMAL_DIRICHLET_MULTINOMIAL,
            DirichletSpec(_as_composition(alpha_tilde), alpha_s),
            LognormalTotal(mu, sigma_sq),
        )

    @property
    def center(self) -> Composition:
        """Expected class probabilities: alpha-tilde, or the fixed p."""
        if isinstance(self.probabilities, DirichletSpec):
            return self.probabilities.alpha_tilde
        return self.probabilities

    @property
    def alpha_s(self) -> Optional[float]:
        return self.probabilities.alpha_s if isinstance(self.probabilities, DirichletSpec) else None

    @property
    def n_parts(self) -> int:
        return self.center.dim


def _as_composition(p) -> Composition:
    return p if isinstance(p, Composition) else Composition(p)


@dataclass(frozen=True, eq=False)
class CountVector:
    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.ndim != 1 or np.any(counts < 0):
            raise ValueError("counts must be a vector of nonnegative integers")
        if self.total < 1 or int(counts.sum()) != self.total:
            raise ValueError(f"counts sum to {int(counts.sum())}, expected positive total {self.total}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", int(self.total))

    @classmethod
    def of(cls, counts) -> "CountVector":
        counts = np.asarray(counts, dtype=np.int64)
        return cls(counts, int(counts.sum()))


def make_rng(seed: int, stream: Optional[int] = None) -> np.random.Generator:
    """Philox generator for ``seed``, or for its child stream ``stream`` (the ``spawn`` child of that index)."""
    if stream is not None and stream < 0:
        raise ValueError(f"Stream index must be nonnegative, got {stream}")
    spawn_key = () if stream is None else (int(stream),)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=spawn_key)))


def sample_gamma(shape: float, rng: np.random.Generator) -> float:
    """One Gamma(shape, 1) variate, strictly positive.

    Shape >= 1 uses numpy's squeeze/rejection sampler; shape < 1 is boosted as
    ``Gamma(a + 1) * U**(1/a)``. Draws that underflow to zero are redrawn.
    """
    if not shape > 0:
        raise ValueError(f"Gamma shape must be positive, got {shape}")
    while True:
        if shape >= 1.0:
            g = rng.standard_gamma(shape)
        else:
            g = rng.standard_gamma(shape + 1.0) * (1.0 - rng.random()) ** (1.0 / shape)
        if g > 0.0:
            return float(g)


def sample_gamma_batch(shape: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` positive Gamma(shape, 1) variates; zero underflows are redrawn."""
    if not shape > 0:
        raise ValueError(f"Gamma shape must be positive, got {shape}")
    out = np.exp(_log_gamma_batch(np.array([shape]), size, rng)[:, 0])
    zero = out <= 0.0
    while np.any(zero):
        out[zero] = np.exp(_log_gamma_batch(np.array([shape]), int(zero.sum()), rng)[:, 0])
        zero = out <= 0.0
    return out


def _log_gamma_batch(shapes: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    # log-space keeps shape << 1 variates representable
    boosted = shapes < 1.0
    g = rng.standard_gamma(np.where(boosted, shapes + 1.0, shapes), size=(size, shapes.size))
    u = 1.0 - rng.random(size=(size, shapes.size))
    return np.log(g) + np.where(boosted, np.log(u) / shapes, 0.0)


def sample_dirichlet(spec: DirichletSpec, rng: np.random.Generator) -> Composition:
    """One Dirichlet(alpha_s * alpha_tilde) draw.

    Parts that underflow (possible when alpha_j << 1) are floored at the smallest
    positive double so the result stays on the open simplex.
    """
    parts = sample_dirichlet_batch(spec, 1, rng)[0]
    parts = np.maximum(parts, np.finfo(np.float64).tiny)
    return Composition(parts / parts.sum())


def sample_dirichlet_batch(spec: DirichletSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` Dirichlet draws as an (size, J) array; rows sum to one, parts may underflow to 0."""
    return softmax(_log_gamma_batch(spec.alpha, size, rng), axis=1)


def sample_multinomial(k: int, p: Composition, rng: np.random.Generator) -> CountVector:
    """Multinomial(k, p) by sequential conditional binomials (numpy's BTPE/inversion)."""
    if k < 1:
        raise ValueError(f"Multinomial needs k >= 1, got {k}")
    return CountVector(rng.multinomial(int(k), p.parts), int(k))


def sample_multinomial_batch(totals, probabilities: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Multinomial draws for broadcast ``totals`` (n,) and ``probabilities`` (J,) or (n, J)."""
    totals = np.asarray(totals, dtype=np.int64)
    probabilities = np.asarray(probabilities, dtype=np.float64)
    if probabilities.ndim == 1:
        probabilities = np.broadcast_to(probabilities, totals.shape + probabilities.shape)
    return rng.multinomial(totals, probabilities)


def sample_total(spec: TotalCountSpec, rng: np.random.Generator) -> int:
    """Fixed K, or a lognormal total rounded to the nearest integer and clamped at 1."""
    return int(sample_total_batch(spec, 1, rng)[0])


def sample_total_batch(spec: TotalCountSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec, FixedTotal):
        return np.full(size, spec.k, dtype=np.int64)
    raw = rng.lognormal(mean=spec.mu, sigma=np.sqrt(spec.sigma_sq), size=size)
    return np.maximum(np.rint(raw), 1).astype(np.int64)


def sample_counts(model: ModelSpec, rng: np.random.Generator) -> CountVector:
    """One count vector: total, then (if Dirichlet) probabilities, then the multinomial."""
    k = sample_total(model.total, rng)
    if isinstance(model.probabilities, DirichletSpec):
        p = sample_dirichlet(model.probabilities, rng)
    else:
        p = model.probabilities
    return sample_multinomial(k, p, rng)


def sample_counts_batch(model: ModelSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` count vectors from ``model`` as an (size, J) int64 array."""
    totals = sample_total_batch(model.total, size, rng)
    if isinstance(model.probabilities, DirichletSpec):
        probabilities = sample_dirichlet_batch(model.probabilities, size, rng)
    else:
        probabilities = model.probabilities.parts
    return sample_multinomial_batch(totals, probabilities, rng)


def dm_log_pmf(x: CountVector, spec: DirichletSpec) -> float:
    """Exact Dirichlet-multinomial log mass of ``x``."""
    return float(dm_log_pmf_batch(x.counts[np.newaxis, :], spec)[0])


def dm_log_pmf_batch(counts: np.ndarray, spec: DirichletSpec) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    k = counts.sum(axis=1)
    alpha = spec.alpha
    return (
        gammaln(k + 1.0)
        - gammaln(counts + 1.0).sum(axis=1)
        + gammaln(spec.alpha_s)
        - gammaln(spec.alpha_s + k)
        + (gammaln(alpha + counts) - gammaln(alpha)).sum(axis=1)
    )


def multinomial_log_pmf_batch(counts: np.ndarray, p: Composition) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    k = counts.sum(axis=1)
    return gammaln(k + 1.0) - gammaln(counts + 1.0).sum(axis=1) + (counts * np.log(p.parts)).sum(axis=1)
