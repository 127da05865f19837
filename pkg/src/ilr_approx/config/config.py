"""JSON run configuration and its expansion into harness scenarios."""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ilr_approx.approx.approx import CorrectionMode
from ilr_approx.composition.composition import Composition, SbpMatrix, ZeroPolicy, pivotal_sbp
from ilr_approx.constants import (
    DEFAULT_MASTER_SEED,
    DEFAULT_N_DRAWS,
    DEFAULT_ZERO_REPLACEMENT,
    REFERENCE_ALPHA_S,
    REFERENCE_ALPHA_TILDE,
    REFERENCE_TOTALS,
)
from ilr_approx.errors import ConfigError, UnknownReferenceError
from ilr_approx.harness.harness import Scenario
from ilr_approx.harness.table3 import Table3Grid
from ilr_approx.sampling.sampling import Dgd, DirichletSpec, FixedTotal, LognormalTotal, ModelSpec

_TOP_LEVEL_KEYS = {
    "master_seed",
    "n_draws",
    "parallel",
    "output_dir",
    "emit_svg",
    "correction_mode",
    "zero_policy",
    "zero_replacement",
    "sbp",
    "grid",
}
_GRID_KEYS = {"dgd", "alpha_tilde", "alpha_s", "total", "sigma_sq"}


@dataclass(frozen=True)
class GridSpec:
    """Parameter axes; lognormal DGDs read ``total`` as the median exp(mu)."""

    dgd: Tuple[Dgd, ...] = (Dgd.MULTINOMIAL, Dgd.DIRICHLET_MULTINOMIAL)
    alpha_tilde: Tuple[Tuple[float, ...], ...] = (REFERENCE_ALPHA_TILDE,)
    alpha_s: Tuple[float, ...] = REFERENCE_ALPHA_S
    total: Tuple[int, ...] = REFERENCE_TOTALS
    sigma_sq: Tuple[float, ...] = ()


@dataclass(frozen=True)
class RunConfig:
    master_seed: int = DEFAULT_MASTER_SEED
    n_draws: int = DEFAULT_N_DRAWS
    parallel: int = 1
    output_dir: str = "results"
    emit_svg: bool = False
    correction_mode: CorrectionMode = CorrectionMode.CONSISTENT
    zero_policy: ZeroPolicy = ZeroPolicy.RENORMALIZE
    zero_replacement: float = DEFAULT_ZERO_REPLACEMENT
    sbp: Union[str, Tuple[Tuple[int, ...], ...]] = "pivotal"
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        _check(isinstance(self.master_seed, int) and 0 <= self.master_seed < 2**64, "master_seed must be a 64-bit int")
        _check(isinstance(self.n_draws, int) and self.n_draws >= 2, "n_draws must be an integer >= 2")
        _check(isinstance(self.parallel, int) and self.parallel >= 1, "parallel must be an integer >= 1")
        _check(isinstance(self.output_dir, str) and self.output_dir, "output_dir must be a non-empty string")
        _check(isinstance(self.emit_svg, bool), "emit_svg must be a boolean")
        _check(
            isinstance(self.zero_replacement, (int, float)) and self.zero_replacement > 0,
            "zero_replacement must be positive",
        )
        _check(
            self.sbp == "pivotal" or (isinstance(self.sbp, tuple) and len(self.sbp) > 0),
            "sbp must be 'pivotal' or a sign matrix",
        )
        n_parts = {len(a) for a in self.grid.alpha_tilde}
        _check(len(n_parts) <= 1, "all alpha_tilde vectors must have the same length")
        if self.sbp != "pivotal" and n_parts:
            _check(len(self.sbp) == n_parts.pop(), "sbp must have one row per part")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Parse a JSON document; unknown keys and malformed values raise ``ConfigError``."""
        if not isinstance(data, dict):
            raise ConfigError("Config must be a JSON object")
        unknown = set(data) - _TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        kwargs = {k: v for k, v in data.items() if k != "grid"}
        try:
            if "correction_mode" in kwargs:
                kwargs["correction_mode"] = CorrectionMode(kwargs["correction_mode"])
            if "zero_policy" in kwargs:
                kwargs["zero_policy"] = ZeroPolicy(kwargs["zero_policy"])
            if isinstance(kwargs.get("sbp"), list):
                kwargs["sbp"] = tuple(tuple(int(x) for x in row) for row in kwargs["sbp"])
            if "grid" in data:
                kwargs["grid"] = _grid_from_dict(data["grid"])
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Malformed config: {e}") from e
        return cls(**kwargs)

    def to_dict(self) -> Dict[str, Any]:
        """Plain JSON-compatible echo that ``from_dict`` parses back to an equal config."""
        return {
            "master_seed": self.master_seed,
            "n_draws": self.n_draws,
            "parallel": self.parallel,
            "output_dir": self.output_dir,
            "emit_svg": self.emit_svg,
            "correction_mode": self.correction_mode.value,
            "zero_policy": self.zero_policy.value,
            "zero_replacement": self.zero_replacement,
            "sbp": self.sbp if self.sbp == "pivotal" else [list(row) for row in self.sbp],
            "grid": {
                "dgd": [d.value for d in self.grid.dgd],
                "alpha_tilde": [list(a) for a in self.grid.alpha_tilde],
                "alpha_s": list(self.grid.alpha_s),
                "total": list(self.grid.total),
                "sigma_sq": list(self.grid.sigma_sq),
            },
        }

    def with_overrides(
        self,
        n_draws: Optional[int] = None,
        master_seed: Optional[int] = None,
        parallel: Optional[int] = None,
        output_dir: Optional[str] = None,
    ) -> "RunConfig":
        """Apply command-line overrides; ``None`` keeps the configured value."""
        changes = {
            "n_draws": n_draws,
            "master_seed": master_seed,
            "parallel": parallel,
            "output_dir": None if output_dir is None else str(output_dir),
        }
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _check(condition, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _positive_numbers(values, name: str, integer: bool = False) -> tuple:
    _check(isinstance(values, list), f"grid.{name} must be a list")
    out = []
    for v in values:
        _check(isinstance(v, (int, float)) and not isinstance(v, bool), f"grid.{name} entries must be numbers")
        _check(math.isfinite(v) and v > 0, f"grid.{name} entries must be positive, got {v}")
        if integer:
            _check(float(v).is_integer(), f"grid.{name} entries must be integers, got {v}")
            v = int(v)
        out.append(v)
    return tuple(out)


def _grid_from_dict(data: Dict[str, Any]) -> GridSpec:
    _check(isinstance(data, dict), "grid must be a JSON object")
    unknown = set(data) - _GRID_KEYS
    _check(not unknown, f"Unknown grid keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    if "dgd" in data:
        _check(isinstance(data["dgd"], list), "grid.dgd must be a list")
        try:
            kwargs["dgd"] = tuple(Dgd.parse(d) for d in data["dgd"])
        except ValueError as e:
            raise ConfigError(f"Unknown DGD selector: {e}") from e
    if "alpha_tilde" in data:
        _check(isinstance(data["alpha_tilde"], list), "grid.alpha_tilde must be a list of vectors")
        vectors = []
        for vector in data["alpha_tilde"]:
            values = _positive_numbers(vector, "alpha_tilde")
            _check(len(values) >= 2, "alpha_tilde vectors need at least two parts")
            _check(abs(sum(values) - 1.0) < 1e-9, f"alpha_tilde must sum to 1, got {sum(values)}")
            vectors.append(values)
        kwargs["alpha_tilde"] = tuple(vectors)
    if "alpha_s" in data:
        kwargs["alpha_s"] = _positive_numbers(data["alpha_s"], "alpha_s")
    if "total" in data:
        kwargs["total"] = _positive_numbers(data["total"], "total", integer=True)
    if "sigma_sq" in data:
        kwargs["sigma_sq"] = _positive_numbers(data["sigma_sq"], "sigma_sq")
    return GridSpec(**kwargs)


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read a RunConfig from a JSON file.

    Raises:
        OSError: the file cannot be read
        ConfigError: the document is not valid JSON or fails validation
    """
    path = Path(path)
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
    config = RunConfig.from_dict(data)
    logging.info(f"Loaded config {path} (hash {config_hash(config)[:12]})")
    return config


def canonical_json(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))


def config_hash(config: RunConfig) -> str:
    """SHA-256 of the canonical JSON echo."""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def _fmt(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return f"{value:g}".replace(".", "p")


def scenario_label(dgd: Dgd, total: int, alpha_s=None, sigma_sq=None, variant: Optional[int] = None) -> str:
    """Label such as ``b_as101_K1000`` or ``d_as101_s2_0p1_K101_t2``."""
    label = dgd.letter
    if alpha_s is not None:
        label += f"_as{_fmt(alpha_s)}"
    if sigma_sq is not None:
        label += f"_s2_{_fmt(sigma_sq)}"
    label += f"_K{total}"
    if variant is not None:
        label += f"_t{variant}"
    return label


def _sbp_for(config: RunConfig, n_parts: int) -> SbpMatrix:
    if config.sbp == "pivotal":
        return pivotal_sbp(n_parts)
    return SbpMatrix(np.array(config.sbp, dtype=np.int8))


def build_scenarios(config: RunConfig) -> List[Scenario]:
    """Expand the grid into scenarios, each drawing from the child stream ``position`` of ``master_seed``.

    Dirichlet DGDs iterate alpha_s; lognormal DGDs iterate sigma^2 with mu = ln(total). A grid
    with an empty axis expands to no scenarios for the DGDs that use it.
    """
    grid = config.grid
    many_vectors = len(grid.alpha_tilde) > 1
    entries = []
    for dgd in grid.dgd:
        for t, alpha_tilde in enumerate(grid.alpha_tilde, start=1):
            center = Composition.from_positive(alpha_tilde)
            for alpha_s in grid.alpha_s if dgd.has_dirichlet else (None,):
                for sigma_sq in grid.sigma_sq if dgd.has_lognormal_total else (None,):
                    for total in grid.total:
                        probabilities = center if alpha_s is None else DirichletSpec(center, alpha_s)
                        if sigma_sq is None:
                            total_spec = FixedTotal(total)
                        else:
                            total_spec = LognormalTotal.from_median(total, sigma_sq)
                        label = scenario_label(dgd, total, alpha_s, sigma_sq, t if many_vectors else None)
                        entries.append((label, ModelSpec(dgd, probabilities, total_spec)))

    try:
        sbp = _sbp_for(config, len(grid.alpha_tilde[0])) if entries else None
        return [
            Scenario(
                model=model,
                sbp=sbp,
                n_draws=config.n_draws,
                zero_replacement=config.zero_replacement,
                seed=config.master_seed,
                label=label,
                zero_policy=config.zero_policy,
                stream=index,
            )
            for index, (label, model) in enumerate(entries)
        ]
    except ValueError as e:
        raise ConfigError(f"Cannot build scenarios: {e}") from e


def find_scenario(scenarios: List[Scenario], label: str) -> Scenario:
    for scenario in scenarios:
        if scenario.label == label:
            return scenario
    raise UnknownReferenceError(f"No scenario labelled {label!r} in the grid")


def table3_grid(config: RunConfig) -> Table3Grid:
    """Table axes taken from the run grid; sigma^2 falls back to the table's own values."""
    grid = config.grid
    return Table3Grid(
        alpha_s=grid.alpha_s,
        totals=grid.total,
        sigma_sq=grid.sigma_sq or Table3Grid().sigma_sq,
        dgds=grid.dgd,
    )
