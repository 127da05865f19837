from .exact import ExactMoments, enumerate_exact
from .grid import GridResult, Variant, approximations_for, evaluate_scenario, run_grid
from .harness import (
    ComparisonReport,
    EmpiricalSummary,
    QqSeries,
    Scenario,
    compare,
    proportion_qq_series,
    qq_correlation,
    qq_series,
    run_scenario,
    sample_scenario_counts,
)
from .table3 import TABLE3_COLUMNS, Table3Grid, excess_variability_table

__all__ = [
    "TABLE3_COLUMNS",
    "ComparisonReport",
    "EmpiricalSummary",
    "ExactMoments",
    "GridResult",
    "QqSeries",
    "Scenario",
    "Table3Grid",
    "Variant",
    "approximations_for",
    "compare",
    "enumerate_exact",
    "evaluate_scenario",
    "excess_variability_table",
    "proportion_qq_series",
    "qq_correlation",
    "qq_series",
    "run_grid",
    "run_scenario",
    "sample_scenario_counts",
]
