"""Monte Carlo engine: draw counts, close them, map to ilr coordinates and summarise."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtri

from ilr_approx.approx.approx import NormalApprox, approx_proportions
from ilr_approx.composition.composition import SbpMatrix, ZeroPolicy, contrast_matrix, ilr_batch, replace_zeros
from ilr_approx.errors import DimensionMismatchError, UnknownReferenceError
from ilr_approx.linalg.linalg import SymmetricMatrix, sym_eigen
from ilr_approx.sampling.sampling import ModelSpec, make_rng, sample_counts_batch


@dataclass(frozen=True, eq=False)
class Scenario:
    """One simulation setting.

    Draws come from ``make_rng(seed, stream)``: grid scenarios share the master seed and take
    their grid position as ``stream``.
    """

    model: ModelSpec
    sbp: SbpMatrix
    n_draws: int
    zero_replacement: float
    seed: int
    label: str
    zero_policy: ZeroPolicy = ZeroPolicy.RENORMALIZE
    stream: Optional[int] = None

    def __post_init__(self):
        if self.n_draws < 2:
            raise ValueError(f"Scenario {self.label!r} needs at least 2 draws, got {self.n_draws}")
        if self.stream is not None and self.stream < 0:
            raise ValueError(f"Scenario {self.label!r}: stream index must be nonnegative, got {self.stream}")
        if self.zero_replacement < 0:
            raise ValueError("zero_replacement must be nonnegative")
        if self.sbp.n_parts != self.model.n_parts:
            raise DimensionMismatchError(
                f"Scenario {self.label!r}: SBP has {self.sbp.n_parts} parts, model has {self.model.n_parts}"
            )
        object.__setattr__(self, "zero_policy", ZeroPolicy(self.zero_policy))


@dataclass(frozen=True, eq=False)
class EmpiricalSummary:
    label: str
    n_draws: int
    mean_ilr: np.ndarray
    cov_ilr: SymmetricMatrix
    eigenvalues: np.ndarray
    sorted_coords: np.ndarray
    mean_props: np.ndarray
    cov_props: SymmetricMatrix
    sorted_props: np.ndarray
    zero_fraction: float


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """Per-coordinate ``ln(|empirical| / |approx|)`` for means and sorted eigenvalues."""

    log_ratio_means: np.ndarray
    log_ratio_eigs: np.ndarray
    sign_mismatch: np.ndarray


@dataclass(frozen=True, eq=False)
class QqSeries:
    theoretical_quantiles: np.ndarray
    sample_quantiles: np.ndarray


def _mean_and_cov(samples: np.ndarray):
    # two-pass: centre first, then accumulate products
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / (samples.shape[0] - 1)
    return mean, SymmetricMatrix((cov + cov.T) / 2.0)


def sample_scenario_counts(scenario: Scenario, n_draws: Optional[int] = None) -> np.ndarray:
    """Draw the scenario's count matrix (n_draws x J) from its own stream."""
    rng = make_rng(scenario.seed, scenario.stream)
    return sample_counts_batch(scenario.model, n_draws or scenario.n_draws, rng)


def run_scenario(scenario: Scenario) -> EmpiricalSummary:
    """Simulate ``scenario`` and summarise its ilr coordinates and proportions.

    Covariances use the n - 1 divisor.
    """
    logging.info(f"Running scenario {scenario.label} ({scenario.n_draws} draws)")
    counts = sample_scenario_counts(scenario)
    zero_fraction = float(np.mean(np.any(counts == 0, axis=1)))
    props = replace_zeros(counts, scenario.zero_replacement, scenario.zero_policy)
    coords = ilr_batch(props, contrast_matrix(scenario.sbp))

    mean_ilr, cov_ilr = _mean_and_cov(coords)
    mean_props, cov_props = _mean_and_cov(props)
    eigenvalues = sym_eigen(cov_ilr).eigenvalues

    logging.info(f"Scenario {scenario.label} done: zero fraction {zero_fraction:.4f}")
    return EmpiricalSummary(
        label=scenario.label,
        n_draws=scenario.n_draws,
        mean_ilr=mean_ilr,
        cov_ilr=cov_ilr,
        eigenvalues=eigenvalues,
        sorted_coords=np.sort(coords, axis=0),
        mean_props=mean_props,
        cov_props=cov_props,
        sorted_props=np.sort(props, axis=0),
        zero_fraction=zero_fraction,
    )


def compare(e: EmpiricalSummary, a: NormalApprox) -> ComparisonReport:
    """Log-ratios of empirical to approximate means and eigenvalues; 0 is perfect correspondence.

    Means are compared on absolute values with ``sign_mismatch`` set where the signs differ.
    An approximate mean of exactly 0 against a nonzero empirical mean gives +inf (flagged);
    eigenvalue pairs with a non-positive member give NaN.
    """
    em = np.asarray(e.mean_ilr, dtype=np.float64)
    am = np.asarray(a.mean, dtype=np.float64)
    if em.shape != am.shape or e.eigenvalues.shape != a.eigenvalues.shape:
        raise DimensionMismatchError(f"Cannot compare {em.size} empirical coordinates with {am.size} approximate")

    sign_mismatch = np.sign(em) != np.sign(am)
    with np.errstate(divide="ignore", invalid="ignore"):
        means = np.log(np.abs(em) / np.abs(am))
        means = np.where((em == 0) & (am == 0), 0.0, means)
        positive = (e.eigenvalues > 0) & (a.eigenvalues > 0)
        eigs = np.where(positive, np.log(e.eigenvalues / np.where(positive, a.eigenvalues, 1.0)), np.nan)

    if not np.all(np.isfinite(means)) or not np.all(np.isfinite(eigs)):
        logging.warning(f"Scenario {e.label}: non-finite log-ratios in comparison")
    return ComparisonReport(log_ratio_means=means, log_ratio_eigs=eigs, sign_mismatch=sign_mismatch)


def _plotting_positions(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def qq_series(sorted_samples, a: NormalApprox, coord_index: int) -> QqSeries:
    """Normal Q-Q series for one coordinate: quantile i is ``mean + sd * Phi^-1((i - 0.5)/n)``."""
    samples = np.asarray(sorted_samples, dtype=np.float64)
    if not 0 <= coord_index < a.mean.size:
        raise UnknownReferenceError(f"Coordinate index {coord_index} out of range 0..{a.mean.size - 1}")
    if samples.ndim != 1 or np.any(np.diff(samples) < 0):
        raise ValueError("qq_series needs a sorted 1-D sample")
    theoretical = a.mean[coord_index] + a.sd[coord_index] * ndtri(_plotting_positions(samples.size))
    return QqSeries(theoretical_quantiles=theoretical, sample_quantiles=samples)


def proportion_qq_series(e: EmpiricalSummary, model: ModelSpec, part_index: int) -> QqSeries:
    """Q-Q series of one simulated proportion against the normal approximation of the proportions."""
    if not 0 <= part_index < e.sorted_props.shape[1]:
        raise UnknownReferenceError(f"Part index {part_index} out of range 0..{e.sorted_props.shape[1] - 1}")
    return qq_series(e.sorted_props[:, part_index], approx_proportions(model), part_index)


def qq_correlation(series: QqSeries) -> float:
    """Pearson correlation of a Q-Q series; NaN when the sample is constant."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if np.ptp(series.sample_quantiles) == 0:
            return float("nan")
        return float(np.corrcoef(series.theoretical_quantiles, series.sample_quantiles)[0, 1])
