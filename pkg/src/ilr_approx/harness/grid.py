import logging
import math
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

from ilr_approx.approx.approx import (
    CorrectionMode,
    NormalApprox,
    approx_ilr_corrected,
    approx_ilr_multinomial,
    approx_ilr_plugin,
)
from ilr_approx.composition.composition import ContrastMatrix, contrast_matrix
from ilr_approx.harness.harness import ComparisonReport, EmpiricalSummary, Scenario, compare, run_scenario
from ilr_approx.process_manager import ProcessManager
from ilr_approx.sampling.sampling import FixedTotal, ModelSpec


class Variant(str, Enum):
    PLUGIN = "plugin"
    CORRECTED = "corrected"
    MULTINOMIAL = "multinomial"


@dataclass(frozen=True, eq=False)
class GridResult:
    """Outcome of one scenario; ``error`` holds the failure message when the scenario did not run."""

    scenario: Scenario
    summary: Optional[EmpiricalSummary] = None
    comparisons: Dict[Variant, ComparisonReport] = field(default_factory=dict)
    approximations: Dict[Variant, NormalApprox] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def label(self) -> str:
        return self.scenario.label


def approximations_for(
    model: ModelSpec, v: ContrastMatrix, correction: CorrectionMode = CorrectionMode.CONSISTENT
) -> Dict[Variant, NormalApprox]:
    """The three approximations every scenario is compared against.

    The multinomial baseline uses the model center and K, or the median exp(mu) for lognormal totals.
    """
    k = model.total.k if isinstance(model.total, FixedTotal) else math.exp(model.total.mu)
    return {
        Variant.PLUGIN: approx_ilr_plugin(model, v),
        Variant.CORRECTED: approx_ilr_corrected(model, v, correction),
        Variant.MULTINOMIAL: approx_ilr_multinomial(model.center, k, v),
    }


def evaluate_scenario(scenario: Scenario, correction: CorrectionMode = CorrectionMode.CONSISTENT) -> GridResult:
    """Run one scenario and compare it with every approximation variant; never raises."""
    try:
        summary = run_scenario(scenario)
        approximations = approximations_for(scenario.model, contrast_matrix(scenario.sbp), correction)
        comparisons = {variant: compare(summary, approx) for variant, approx in approximations.items()}
        return GridResult(scenario=scenario, summary=summary, comparisons=comparisons, approximations=approximations)
    except Exception as e:
        logging.error(f"Scenario {scenario.label} failed: {str(e)}")
        logging.error(traceback.format_exc())
        return GridResult(scenario=scenario, error=f"{type(e).__name__}: {e}")


def _check_labels(scenarios: Sequence[Scenario]) -> None:
    seen = set()
    for scenario in scenarios:
        if scenario.label in seen:
            raise ValueError(f"Duplicate scenario label {scenario.label!r}")
        seen.add(scenario.label)


def run_grid(
    scenarios: Sequence[Scenario],
    parallelism: int = 1,
    correction: CorrectionMode = CorrectionMode.CONSISTENT,
) -> List[GridResult]:
    """Evaluate every scenario, serially or on a process pool, and return results ordered by label.

    Each scenario draws from its own seeded stream, so the output does not depend on
    ``parallelism``. Failures are returned as results with ``error`` set.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be at least 1, got {parallelism}")
    _check_labels(scenarios)
    if not scenarios:
        logging.info("Empty scenario grid, nothing to run")
        return []

    logging.info(f"Running {len(scenarios)} scenarios with parallelism {parallelism}")
    if parallelism == 1 or len(scenarios) == 1:
        results = [evaluate_scenario(s, correction) for s in scenarios]
    else:
        results = _run_pool(scenarios, parallelism, correction)

    failed = [r.label for r in results if not r.ok]
    if failed:
        logging.warning(f"{len(failed)} of {len(results)} scenarios failed: {', '.join(sorted(failed))}")
    return sorted(results, key=lambda r: r.label)


def _run_pool(scenarios: Sequence[Scenario], parallelism: int, correction: CorrectionMode) -> List[GridResult]:
    manager = ProcessManager.get_instance()
    results = []
    with ProcessPoolExecutor(max_workers=min(parallelism, len(scenarios))) as pool:
        futures = {pool.submit(evaluate_scenario, s, correction): s for s in scenarios}
        manager.track_workers()
        for future in as_completed(futures):
            scenario = futures[future]
            try:
                results.append(future.result())
            except Exception as e:
                # worker died or the result could not be unpickled
                logging.error(f"Worker for scenario {scenario.label} failed: {str(e)}")
                logging.error(traceback.format_exc())
                results.append(GridResult(scenario=scenario, error=f"{type(e).__name__}: {e}"))
            logging.info(f"Finished {len(results)}/{len(futures)} scenarios")
    manager.clear_pids()
    return results
