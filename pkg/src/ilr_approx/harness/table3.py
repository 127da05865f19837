import math
from dataclasses import dataclass

import pandas as pd

from ilr_approx.approx.approx import excess_variability, gamma_factor
from ilr_approx.constants import REFERENCE_ALPHA_S, REFERENCE_SIGMA_SQ, REFERENCE_TOTALS
from ilr_approx.sampling.sampling import Dgd

TABLE3_COLUMNS = ["dgd", "alpha_s", "sigma_sq", "K", "excess"]


@dataclass(frozen=True)
class Table3Grid:
    """Axes of the excess variability table. For lognormal rows ``totals`` are medians exp(mu)."""

    alpha_s: tuple = REFERENCE_ALPHA_S
    totals: tuple = REFERENCE_TOTALS
    sigma_sq: tuple = REFERENCE_SIGMA_SQ
    dgds: tuple = tuple(Dgd)

    def __post_init__(self):
        object.__setattr__(self, "dgds", tuple(Dgd.parse(d) for d in self.dgds))
        for name in ("alpha_s", "totals", "sigma_sq"):
            values = tuple(getattr(self, name))
            if any(not v > 0 for v in values):
                raise ValueError(f"Table3Grid.{name} must be positive")
            object.__setattr__(self, name, values)


def _excess(dgd: Dgd, alpha_s: float, k: float, sigma_sq: float) -> float:
    if not dgd.has_lognormal_total:
        return excess_variability(alpha_s, k)
    mu = math.log(k)
    return k * gamma_factor(alpha_s, mu, sigma_sq)


def excess_variability_table(grid: Table3Grid = Table3Grid()) -> pd.DataFrame:
    """Excess variability of the proportions over the multinomial, one row per (table row, K).

    Rows follow the reference order: multinomial, Dirichlet-multinomial by alpha_s, then per sigma^2
    the lognormal-multinomial followed by lognormal-Dirichlet-multinomial by alpha_s. Missing
    parameters are NaN.
    """
    rows = []
    table_rows = []
    fixed = [d for d in (Dgd.MULTINOMIAL, Dgd.DIRICHLET_MULTINOMIAL) if d in grid.dgds]
    lognormal = [d for d in (Dgd.LOGNORMAL_MULTINOMIAL, Dgd.LOGNORMAL_DIRICHLET_MULTINOMIAL) if d in grid.dgds]
    for dgd in fixed:
        for alpha_s in grid.alpha_s if dgd.has_dirichlet else (math.inf,):
            table_rows.append((dgd, alpha_s, math.nan))
    for sigma_sq in grid.sigma_sq if lognormal else ():
        for dgd in lognormal:
            for alpha_s in grid.alpha_s if dgd.has_dirichlet else (math.inf,):
                table_rows.append((dgd, alpha_s, sigma_sq))

    for dgd, alpha_s, sigma_sq in table_rows:
        for k in grid.totals:
            rows.append(
                {
                    "dgd": dgd.short_name,
                    "alpha_s": alpha_s if math.isfinite(alpha_s) else math.nan,
                    "sigma_sq": sigma_sq,
                    "K": int(k),
                    "excess": _excess(dgd, alpha_s, k, sigma_sq),
                }
            )
    return pd.DataFrame(rows, columns=TABLE3_COLUMNS)
