from .figures import (
    DGD_PAIRS,
    PERFECT_CORRESPONDENCE,
    composition_panel,
    log_ratio_figures,
    log_ratio_plot,
    log_ratio_series,
)

__all__ = [
    "DGD_PAIRS",
    "PERFECT_CORRESPONDENCE",
    "composition_panel",
    "log_ratio_figures",
    "log_ratio_plot",
    "log_ratio_series",
]
