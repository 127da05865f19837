from .approx import (
    CorrectionMode,
    CorrectionTerms,
    CovariancePath,
    LognormalMoments,
    NormalApprox,
    approx_ilr_corrected,
    approx_ilr_multinomial,
    approx_ilr_plugin,
    approx_proportions,
    correction_terms,
    excess_variability,
    gamma_factor,
    log_expectation_correction,
    lognormal_moments,
    sigma_p,
    sigma_pi,
    variance_scale,
)

__all__ = [
    "CorrectionMode",
    "CorrectionTerms",
    "CovariancePath",
    "LognormalMoments",
    "NormalApprox",
    "approx_ilr_corrected",
    "approx_ilr_multinomial",
    "approx_ilr_plugin",
    "approx_proportions",
    "correction_terms",
    "excess_variability",
    "gamma_factor",
    "log_expectation_correction",
    "lognormal_moments",
    "sigma_p",
    "sigma_pi",
    "variance_scale",
]
