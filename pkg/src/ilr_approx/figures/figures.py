"""SVG views of the CSV outputs. Figures are drawn from the same frames that are written to disk."""

import logging
import math
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

PERFECT_CORRESPONDENCE = "perfect correspondence"
DGD_PAIRS = (("Mn", "Dir-Mn"), ("LN-Mn", "LN-Dir-Mn"))
_VARIANT_STYLES = {"plugin": ("o", "-"), "corrected": ("s", "--"), "multinomial": ("^", ":")}
_SERIES_KEYS = ["dgd", "alpha_s", "sigma_sq", "variant"]

# fixed salt and no date so the same data renders to the same bytes
plt.rcParams["svg.hashsalt"] = "ilr-approx"
plt.rcParams["svg.fonttype"] = "none"


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logging.info(f"Wrote figure {path}")
    return path


def composition_panel(frame: pd.DataFrame, title: str, path: Union[str, Path]) -> Path:
    """Stacked bars of closed draws, one bar per draw, in the row order of ``frame``."""
    parts = [c for c in frame.columns if c != "draw"]
    fig, ax = plt.subplots(figsize=(8, 3.5))
    bottom = None
    x = frame["draw"].to_numpy()
    for part in parts:
        values = frame[part].to_numpy()
        ax.bar(x, values, width=1.0, bottom=bottom, label=part, linewidth=0)
        bottom = values if bottom is None else bottom + values
    if len(x):
        ax.set_xlim(x.min() - 0.5, x.max() + 0.5)
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("draw")
    ax.set_ylabel("proportion")
    ax.set_title(title, fontsize=10)
    ax.legend(loc="upper left", bbox_to_anchor=(1.0, 1.0), fontsize=8, frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def _numeric_key(value) -> float:
    return -math.inf if pd.isna(value) else float(value)


def _series_name(dgd: str, alpha_s, sigma_sq, variant: str) -> str:
    name = dgd
    if not pd.isna(alpha_s):
        name += f" as={alpha_s:g}"
    if not pd.isna(sigma_sq):
        name += f" s2={sigma_sq:g}"
    return f"{name} {variant}"


def log_ratio_series(
    comparisons: pd.DataFrame, metric: str, dgds: Sequence[str], coord: int
) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    """Lines of one coordinate's log-ratios as ``(name, log10 K, value)``.

    There is one line per (dgd, alpha_s, sigma^2, variant), points sorted by K. Lines are
    ordered by ``dgds``, then numerically by alpha_s and sigma^2, then by variant.
    """
    data = comparisons[comparisons["dgd"].isin(dgds) & (comparisons["coord"] == coord)]
    data = data.astype({"alpha_s": float, "sigma_sq": float, "K": float})
    dgd_rank = {dgd: i for i, dgd in enumerate(dgds)}
    variant_rank = {variant: i for i, variant in enumerate(_VARIANT_STYLES)}

    groups = list(data.groupby(_SERIES_KEYS, dropna=False, sort=False))
    groups.sort(
        key=lambda item: (
            dgd_rank[item[0][0]],
            _numeric_key(item[0][1]),
            _numeric_key(item[0][2]),
            variant_rank.get(item[0][3], len(variant_rank)),
        )
    )
    series = []
    for (dgd, alpha_s, sigma_sq, variant), group in groups:
        group = group.sort_values("K", kind="stable")
        series.append(
            (
                _series_name(dgd, alpha_s, sigma_sq, variant),
                np.log10(group["K"].to_numpy()),
                group[metric].to_numpy(dtype=float),
            )
        )
    return series


def log_ratio_plot(comparisons: pd.DataFrame, metric: str, dgds: Sequence[str], path: Union[str, Path]) -> Path:
    """Log-ratio of one metric against log10 K, one panel per coordinate.

    ``metric`` is ``log_ratio_mean`` or ``log_ratio_eig``. Each (dgd, alpha_s, sigma^2) family
    keeps its colour across panels, variants differ by marker and line style, and a horizontal
    line at zero marks perfect correspondence.
    """
    data = comparisons[comparisons["dgd"].isin(dgds)]
    coords = sorted(data["coord"].unique())

    colours = {}
    fig, axes = plt.subplots(len(coords), 1, figsize=(7.5, 2.4 * len(coords)), squeeze=False, sharex=True)
    for ax, coord in zip(axes[:, 0], coords):
        for name, x, y in log_ratio_series(comparisons, metric, dgds, coord):
            family, variant = name.rsplit(" ", 1)
            colour = colours.setdefault(family, f"C{len(colours) % 10}")
            marker, linestyle = _VARIANT_STYLES.get(variant, ("o", "-"))
            ax.plot(x, y, color=colour, marker=marker, linestyle=linestyle, markersize=4, linewidth=1.0, label=name)
        ax.axhline(0.0, color="black", linewidth=0.8, label=PERFECT_CORRESPONDENCE)
        ax.set_ylabel(f"coord {coord}")
    axes[-1, 0].set_xlabel("log10 K")
    axes[0, 0].legend(loc="upper left", bbox_to_anchor=(1.0, 1.0), fontsize=7, frameon=False)
    axes[0, 0].set_title(f"{metric} ({' / '.join(dgds)})", fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def log_ratio_figures(comparisons: pd.DataFrame, out_dir: Union[str, Path]) -> List[Path]:
    """Mean and eigenvalue log-ratio plots for every DGD pair present in ``comparisons``."""
    written = []
    for pair in DGD_PAIRS:
        if not comparisons["dgd"].isin(pair).any():
            continue
        stem = "fixed" if pair[0] == "Mn" else "lognormal"
        for metric in ("log_ratio_mean", "log_ratio_eig"):
            written.append(log_ratio_plot(comparisons, metric, pair, Path(out_dir) / f"{metric}_{stem}.svg"))
    return written
