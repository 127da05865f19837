"""Brute-force oracle: exact ilr moments for small fixed-total instances."""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from ilr_approx.composition.composition import SbpMatrix, contrast_matrix, ilr_batch, replace_zeros
from ilr_approx.constants import DEFAULT_ZERO_REPLACEMENT, ENUMERATED_MASS_TOL, MAX_ENUMERATED_COMPOSITIONS
from ilr_approx.errors import DimensionMismatchError, EnumerationMassError, InstanceTooLargeError
from ilr_approx.linalg.linalg import SymmetricMatrix
from ilr_approx.sampling.sampling import (
    DirichletSpec,
    FixedTotal,
    ModelSpec,
    dm_log_pmf_batch,
    multinomial_log_pmf_batch,
)


@dataclass(frozen=True, eq=False)
class ExactMoments:
    """Exact moments of ilr(close(x)) plus the full outcome table they were computed from."""

    mean_ilr: np.ndarray
    cov_ilr: SymmetricMatrix
    outcomes: np.ndarray
    probabilities: np.ndarray
    coords: np.ndarray


def _compositions(k: int, j: int) -> np.ndarray:
    # stars and bars: each choice of j - 1 bar positions among k + j - 1 slots is one outcome
    rows = []
    for bars in itertools.combinations(range(k + j - 1), j - 1):
        edges = (-1,) + bars + (k + j - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(j)])
    return np.array(rows, dtype=np.int64)


def enumerate_exact(
    model: ModelSpec,
    sbp: SbpMatrix,
    zero_replacement: float = DEFAULT_ZERO_REPLACEMENT,
    limit: int = MAX_ENUMERATED_COMPOSITIONS,
) -> ExactMoments:
    """Exact ilr mean and covariance by summing over every count vector with total K.

    Only fixed totals are supported. Weights come from the multinomial or Dirichlet-multinomial
    mass function, zero counts are replaced before closure exactly as in the Monte Carlo path.

    Raises:
        InstanceTooLargeError: more than ``limit`` compositions of K into J parts.
        EnumerationMassError: the probabilities differ from a total of one by more than 1e-9.
    """
    if not isinstance(model.total, FixedTotal):
        raise ValueError("enumerate_exact needs a fixed total count")
    if sbp.n_parts != model.n_parts:
        raise DimensionMismatchError(f"SBP has {sbp.n_parts} parts, model has {model.n_parts}")
    k, j = model.total.k, model.n_parts
    n_compositions = math.comb(k + j - 1, j - 1)
    if n_compositions > limit:
        raise InstanceTooLargeError(n_compositions, limit)

    outcomes = _compositions(k, j)
    if isinstance(model.probabilities, DirichletSpec):
        log_weights = dm_log_pmf_batch(outcomes, model.probabilities)
    else:
        log_weights = multinomial_log_pmf_batch(outcomes, model.probabilities)
    probabilities = np.exp(log_weights)
    mass = probabilities.sum()
    if abs(mass - 1.0) > ENUMERATED_MASS_TOL:
        raise EnumerationMassError(float(mass))

    coords = ilr_batch(replace_zeros(outcomes, zero_replacement), contrast_matrix(sbp))
    mean = probabilities @ coords
    centered = coords - mean
    cov = (centered * probabilities[:, np.newaxis]).T @ centered
    logging.debug(f"Enumerated {n_compositions} outcomes for K={k}, J={j}")
    return ExactMoments(
        mean_ilr=mean,
        cov_ilr=SymmetricMatrix((cov + cov.T) / 2.0),
        outcomes=outcomes,
        probabilities=probabilities,
        coords=coords,
    )
