from .config import (
    GridSpec,
    RunConfig,
    build_scenarios,
    canonical_json,
    config_hash,
    find_scenario,
    load_config,
    scenario_label,
    table3_grid,
)

__all__ = [
    "GridSpec",
    "RunConfig",
    "build_scenarios",
    "canonical_json",
    "config_hash",
    "find_scenario",
    "load_config",
    "scenario_label",
    "table3_grid",
]
