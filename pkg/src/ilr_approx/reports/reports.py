"""Tabular outputs. Every CSV is written by pandas with '.' decimals, shortest round-trip floats
(at most 17 significant digits) and '\\n' line endings, so reruns are byte-identical."""

import json
import logging
import math
import platform
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import matplotlib
import numpy as np
import pandas as pd
import scipy

import ilr_approx
from ilr_approx.composition.composition import replace_zeros
from ilr_approx.config.config import RunConfig, config_hash
from ilr_approx.harness.grid import GridResult
from ilr_approx.harness.harness import EmpiricalSummary, QqSeries, Scenario
from ilr_approx.sampling.sampling import FixedTotal

COMPARISON_COLUMNS = [
    "label",
    "dgd",
    "alpha_s",
    "sigma_sq",
    "K",
    "variant",
    "coord",
    "log_ratio_mean",
    "sign_mismatch",
    "log_ratio_eig",
    "zero_fraction",
    "unimodal",
]
SUMMARY_COLUMNS = ["quantity", "i", "j", "value"]


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write ``frame`` deterministically; parent directories are created."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", na_rep="")
    logging.info(f"Wrote {path} ({len(frame)} rows)")
    return path


def table3_frame(table: pd.DataFrame) -> pd.DataFrame:
    """Round the excess column to the two decimals of the reference table."""
    out = table.copy()
    out["excess"] = [f"{v:.2f}" for v in out["excess"]]
    return out


def summary_frame(summary: EmpiricalSummary) -> pd.DataFrame:
    """Long-format summary: one row per vector entry or matrix cell, indices 1-based."""
    rows = []

    def vector(name, values):
        rows.extend({"quantity": name, "i": i + 1, "j": None, "value": float(v)} for i, v in enumerate(values))

    def matrix(name, values):
        n = values.shape[0]
        rows.extend(
            {"quantity": name, "i": i + 1, "j": j + 1, "value": float(values[i, j])} for i in range(n) for j in range(n)
        )

    rows.append({"quantity": "n_draws", "i": None, "j": None, "value": float(summary.n_draws)})
    rows.append({"quantity": "zero_fraction", "i": None, "j": None, "value": summary.zero_fraction})
    vector("mean_ilr", summary.mean_ilr)
    matrix("cov_ilr", summary.cov_ilr.entries)
    vector("eigenvalue", summary.eigenvalues)
    vector("mean_prop", summary.mean_props)
    matrix("cov_prop", summary.cov_props.entries)
    frame = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    frame["i"] = frame["i"].astype("Int64")
    frame["j"] = frame["j"].astype("Int64")
    return frame


def _scenario_columns(scenario: Scenario) -> dict:
    model = scenario.model
    total = model.total
    return {
        "label": scenario.label,
        "dgd": model.dgd.short_name,
        "alpha_s": model.alpha_s if model.alpha_s is not None else math.nan,
        "sigma_sq": math.nan if isinstance(total, FixedTotal) else total.sigma_sq,
        "K": total.k if isinstance(total, FixedTotal) else int(round(total.median)),
    }


def comparisons_frame(results: Iterable[GridResult]) -> pd.DataFrame:
    """One row per (scenario, approximation variant, coordinate) for every successful scenario."""
    rows = []
    for result in results:
        if not result.ok:
            continue
        base = _scenario_columns(result.scenario)
        probabilities = result.scenario.model.probabilities
        unimodal = getattr(probabilities, "unimodal", True)
        for variant, report in result.comparisons.items():
            for c in range(report.log_ratio_means.size):
                rows.append(
                    {
                        **base,
                        "variant": variant.value,
                        "coord": c + 1,
                        "log_ratio_mean": float(report.log_ratio_means[c]),
                        "sign_mismatch": bool(report.sign_mismatch[c]),
                        "log_ratio_eig": float(report.log_ratio_eigs[c]),
                        "zero_fraction": result.summary.zero_fraction,
                        "unimodal": bool(unimodal),
                    }
                )
    return pd.DataFrame(rows, columns=COMPARISON_COLUMNS)


def qq_frame(series: QqSeries) -> pd.DataFrame:
    return pd.DataFrame({"theoretical": series.theoretical_quantiles, "sample": series.sample_quantiles})


def compositions_frame(counts: np.ndarray, zero_replacement: float) -> pd.DataFrame:
    """Closed draws in wide format (``draw``, ``p1`` .. ``pJ``), sorted descending by the last part."""
    props = replace_zeros(counts, zero_replacement)
    order = np.argsort(-props[:, -1], kind="stable")
    frame = pd.DataFrame(props[order], columns=[f"p{j + 1}" for j in range(props.shape[1])])
    frame.insert(0, "draw", np.arange(1, props.shape[0] + 1))
    return frame


def versions() -> dict:
    return {
        "ilr_approx": ilr_approx.__version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "matplotlib": matplotlib.__version__,
    }


def build_manifest(config: RunConfig, scenarios: Sequence[Scenario], results: Sequence[GridResult]) -> dict:
    failures = {r.label: r.error for r in results if not r.ok}
    return {
        "master_seed": config.master_seed,
        "config_hash": config_hash(config),
        "config": config.to_dict(),
        "versions": versions(),
        "scenarios": [
            {"label": s.label, "seed": s.seed, "stream": s.stream} for s in sorted(scenarios, key=lambda s: s.label)
        ],
        "failures": failures,
    }


def write_manifest(path: Union[str, Path], manifest: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    logging.info(f"Wrote manifest {path}")
    return path


def read_manifest(path: Union[str, Path]) -> Optional[dict]:
    """The manifest at ``path``, or None when it is missing or unreadable."""
    path = Path(path)
    if not path.exists():
        return None
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logging.warning(f"Ignoring manifest {path}: {str(e)}")
        return None
