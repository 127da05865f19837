"""Closed-form moments of compound multinomial proportions and normal approximations of their ilr coordinates.

The four data generating distributions share one code path: a fixed probability vector p is
treated as the Dirichlet mean with alpha_s -> infinity, and every proportion covariance is a
scalar multiple ``c * Sigma_Pi`` of the Dirichlet covariance kernel.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from ilr_approx.composition.composition import Composition, ContrastMatrix
from ilr_approx.constants import PSD_TOL
from ilr_approx.errors import DimensionMismatchError
from ilr_approx.linalg.linalg import SymmetricMatrix, quadratic_form, sym_eigen
from ilr_approx.sampling.sampling import FixedTotal, ModelSpec


class CorrectionMode(str, Enum):
    """Scale of the second-order mean correction.

    ``CONSISTENT`` uses Var(p_j) from the model's proportion covariance; ``LITERAL_EQ10`` uses
    the literal fixed-K factor ``(1/K)(alpha_s + K)/(K alpha_s + K)``, which scales as 1/K^2 in
    the multinomial limit. Lognormal totals use gamma in both modes.
    """

    CONSISTENT = "consistent"
    LITERAL_EQ10 = "literal_eq10"


class CovariancePath(str, Enum):
    SANDWICH = "sandwich"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True, eq=False)
class NormalApprox:
    """Normal approximation N(mean, cov); ``eigenvalues`` of cov are sorted descending."""

    mean: np.ndarray
    cov: SymmetricMatrix
    eigenvalues: np.ndarray = field(init=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64)
        if mean.ndim != 1 or mean.size != self.cov.dim:
            raise DimensionMismatchError(f"mean has shape {mean.shape}, covariance is {self.cov.dim}x{self.cov.dim}")
        mean.setflags(write=False)
        eigenvalues = sym_eigen(self.cov).eigenvalues
        if eigenvalues[-1] < -PSD_TOL:
            raise ValueError(f"Covariance is not PSD (smallest eigenvalue {eigenvalues[-1]:.3e})")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "eigenvalues", eigenvalues)

    @property
    def sd(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.cov.entries), 0.0, None))


@dataclass(frozen=True, eq=False)
class CorrectionTerms:
    """``lam``: diagonal of Sigma_Pi, alpha_j(1 - alpha_j); ``beta``: 1 / alpha_j^2."""

    lam: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        if np.any(self.lam <= 0) or np.any(self.beta <= 0):
            raise ValueError("Correction terms must be strictly positive")


class LognormalMoments(NamedTuple):
    mean: float
    variance: float
    cv: float


def sigma_pi(alpha_tilde: Composition) -> SymmetricMatrix:
    """Dirichlet covariance kernel ``diag(a) - a a'``."""
    a = alpha_tilde.parts
    return SymmetricMatrix(np.diag(a) - np.outer(a, a))


def excess_variability(alpha_s: float, k: float) -> float:
    """Dirichlet-multinomial over multinomial proportion variance, ``(alpha_s + K)/(alpha_s + 1)``."""
    _check_positive(alpha_s=alpha_s, k=k)
    if math.isinf(alpha_s):
        return 1.0
    return (alpha_s + k) / (alpha_s + 1.0)


def sigma_p(alpha_tilde: Composition, alpha_s: float, k: int) -> SymmetricMatrix:
    """Proportion covariance under Dirichlet-multinomial counts with fixed total K."""
    scale = excess_variability(alpha_s, k) / k
    return SymmetricMatrix(scale * sigma_pi(alpha_tilde).entries)


def lognormal_moments(mu: float, sigma_sq: float) -> LognormalMoments:
    _check_positive(sigma_sq=sigma_sq)
    mean = math.exp(mu + sigma_sq / 2.0)
    variance = math.expm1(sigma_sq) * math.exp(2.0 * mu + sigma_sq)
    return LognormalMoments(mean=mean, variance=variance, cv=math.sqrt(math.expm1(sigma_sq)))


def gamma_factor(alpha_s: float, mu: float, sigma_sq: float) -> float:
    """Proportion variance factor under a lognormal total: ``(alpha_s e^{-mu + s2/2} + 1)/(alpha_s + 1)``."""
    _check_positive(alpha_s=alpha_s, sigma_sq=sigma_sq)
    inverse_mean = math.exp(-mu + sigma_sq / 2.0)
    if math.isinf(alpha_s):
        return inverse_mean
    return (alpha_s * inverse_mean + 1.0) / (alpha_s + 1.0)


def variance_scale(model: ModelSpec) -> float:
    """The scalar c with Cov(p) = c * Sigma_Pi for ``model``."""
    alpha_s = model.alpha_s if model.alpha_s is not None else math.inf
    if isinstance(model.total, FixedTotal):
        return excess_variability(alpha_s, model.total.k) / model.total.k
    return gamma_factor(alpha_s, model.total.mu, model.total.sigma_sq)


def _literal_scale(model: ModelSpec) -> float:
    if not isinstance(model.total, FixedTotal):
        return variance_scale(model)
    k = model.total.k
    if model.alpha_s is None:
        return 1.0 / k**2
    return (model.alpha_s + k) / (k * (k * model.alpha_s + k))


def approx_proportions(model: ModelSpec) -> NormalApprox:
    """Normal approximation of the proportions: N(alpha_tilde, c * Sigma_Pi)."""
    center = model.center
    cov = variance_scale(model) * sigma_pi(center).entries
    return NormalApprox(mean=center.parts, cov=SymmetricMatrix(cov))


def _ilr_covariance(model: ModelSpec, v: ContrastMatrix, path: CovariancePath) -> SymmetricMatrix:
    center = model.center
    if center.dim != v.n_parts:
        raise DimensionMismatchError(f"Model has {center.dim} parts, contrast matrix expects {v.n_parts}")
    inverse = 1.0 / center.parts
    if CovariancePath(path) is CovariancePath.SANDWICH:
        return quadratic_form(v.v, inverse, middle=approx_proportions(model).cov.entries)
    return SymmetricMatrix(variance_scale(model) * quadratic_form(v.v, inverse).entries)


def approx_ilr_plugin(
    model: ModelSpec, v: ContrastMatrix, path: CovariancePath = CovariancePath.SANDWICH
) -> NormalApprox:
    """Delta-method approximation N(ilr(alpha_tilde), V' D^-1 Sigma_p D^-1 V).

    ``path`` selects the three-factor sandwich or the equivalent ``c * V' D^-1 V``.
    """
    cov = _ilr_covariance(model, v, path)
    return NormalApprox(mean=v.v.T @ np.log(model.center.parts), cov=cov)


def log_expectation_correction(mean_x, var_x):
    """Second-order approximation ``E ln x ~ ln E x - Var x / (2 (E x)^2)``."""
    mean_x = np.asarray(mean_x, dtype=np.float64)
    if np.any(mean_x <= 0):
        raise ValueError("log_expectation_correction needs a positive mean")
    result = np.log(mean_x) - np.asarray(var_x, dtype=np.float64) / (2.0 * mean_x**2)
    return float(result) if result.ndim == 0 else result


def correction_terms(alpha_tilde: Composition) -> CorrectionTerms:
    a = alpha_tilde.parts
    return CorrectionTerms(lam=a * (1.0 - a), beta=1.0 / a**2)


def approx_ilr_corrected(
    model: ModelSpec,
    v: ContrastMatrix,
    correction: CorrectionMode = CorrectionMode.CONSISTENT,
    path: CovariancePath = CovariancePath.SANDWICH,
) -> NormalApprox:
    """Mean-corrected approximation ``N(V'(ln a - c/2 lam o beta), cov)``; cov as in the plug-in."""
    center = model.center
    terms = correction_terms(center)
    if CorrectionMode(correction) is CorrectionMode.CONSISTENT:
        scale = variance_scale(model)
    else:
        scale = _literal_scale(model)
    # Var(p_j) = scale * lam_j, so the correction is scale/2 * lam_j * beta_j
    log_mean = log_expectation_correction(center.parts, scale * terms.lam)
    return NormalApprox(mean=v.v.T @ log_mean, cov=_ilr_covariance(model, v, path))


def approx_ilr_multinomial(p: Composition, k: float, v: ContrastMatrix) -> NormalApprox:
    """Multinomial baseline ``N(V' ln p, (1/K) V' D^-1 V)``."""
    _check_positive(k=k)
    if p.dim != v.n_parts:
        raise DimensionMismatchError(f"Composition has {p.dim} parts, contrast matrix expects {v.n_parts}")
    cov = quadratic_form(v.v, 1.0 / p.parts).entries / k
    return NormalApprox(mean=v.v.T @ np.log(p.parts), cov=SymmetricMatrix(cov))


def _check_positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
