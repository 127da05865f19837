from .sampling import (
    CountVector,
    DirichletSpec,
    Dgd,
    FixedTotal,
    LognormalTotal,
    ModelSpec,
    dm_log_pmf,
    dm_log_pmf_batch,
    make_rng,
    multinomial_log_pmf_batch,
    sample_counts,
    sample_counts_batch,
    sample_dirichlet,
    sample_dirichlet_batch,
    sample_gamma,
    sample_gamma_batch,
    sample_multinomial,
    sample_multinomial_batch,
    sample_total,
    sample_total_batch,
)

__all__ = [
    "CountVector",
    "DirichletSpec",
    "Dgd",
    "FixedTotal",
    "LognormalTotal",
    "ModelSpec",
    "dm_log_pmf",
    "dm_log_pmf_batch",
    "make_rng",
    "multinomial_log_pmf_batch",
    "sample_counts",
    "sample_counts_batch",
    "sample_dirichlet",
    "sample_dirichlet_batch",
    "sample_gamma",
    "sample_gamma_batch",
    "sample_multinomial",
    "sample_multinomial_batch",
    "sample_total",
    "sample_total_batch",
]
