"""Simplex machinery: closure, sequential binary partitions, contrast matrices and the ilr map."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy.special import softmax

from ilr_approx.constants import DEFAULT_ZERO_REPLACEMENT, ORTHONORMAL_TOL, SIMPLEX_TOL
from ilr_approx.errors import CompositionUnderflowError, DimensionMismatchError, InvalidSbpError

if TYPE_CHECKING:
    from ilr_approx.sampling.sampling import CountVector


class ZeroPolicy(str, Enum):
    """How zero-replaced counts are turned into proportions."""

    RENORMALIZE = "renormalize"
    DIVIDE_BY_ORIGINAL_TOTAL = "divide_by_original_total"


def _frozen(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Composition:
    """A point on the open simplex: J strictly positive parts summing to one."""

    parts: np.ndarray

    def __post_init__(self):
        parts = _frozen(self.parts)
        if parts.ndim != 1 or parts.size < 1:
            raise ValueError(f"Composition needs a non-empty vector, got shape {parts.shape}")
        if not np.all(np.isfinite(parts)) or np.any(parts <= 0.0):
            raise ValueError("Composition parts must be finite and strictly positive")
        if abs(float(parts.sum()) - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"Composition parts must sum to 1, got {float(parts.sum())!r}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_positive(cls, values) -> "Composition":
        """Close an arbitrary positive vector onto the simplex."""
        values = np.asarray(values, dtype=np.float64)
        return cls(values / values.sum())

    @property
    def dim(self) -> int:
        return self.parts.size


@dataclass(frozen=True, eq=False)
class IlrVector:
    coords: np.ndarray

    def __post_init__(self):
        coords = _frozen(self.coords)
        if coords.ndim != 1 or not np.all(np.isfinite(coords)):
            raise ValueError("ilr coordinates must be a finite vector")
        object.__setattr__(self, "coords", coords)


@dataclass(frozen=True)
class SbpReport:
    """Outcome of an SBP check; ``column`` is the 0-based index of the first offending column."""

    ok: bool
    column: Optional[int] = None
    reason: str = ""

    @property
    def message(self) -> str:
        if self.ok:
            return "ok"
        if self.column is None:
            return self.reason
        return f"column {self.column + 1}: {self.reason}"


@dataclass(frozen=True, eq=False)
class SbpMatrix:
    """Sign matrix Psi (J x (J-1)) of a sequential binary partition."""

    psi: np.ndarray

    def __post_init__(self):
        psi = _frozen(self.psi, dtype=np.int8)
        report = validate_sbp(psi)
        if not report.ok:
            raise InvalidSbpError(report)
        object.__setattr__(self, "psi", psi)

    @property
    def n_parts(self) -> int:
        return self.psi.shape[0]


@dataclass(frozen=True, eq=False)
class ContrastMatrix:
    """Orthonormal J x (J-1) log-ratio basis with zero column sums.

    Usually built from an SBP through :func:`contrast_matrix`, but any matrix meeting
    the invariants is accepted directly.
    """

    v: np.ndarray

    def __post_init__(self):
        v = _frozen(self.v)
        if v.ndim != 2 or v.shape[1] != v.shape[0] - 1 or v.shape[0] < 2:
            raise DimensionMismatchError(f"Contrast matrix must be J x (J-1), got shape {v.shape}")
        if np.max(np.abs(v.T @ v - np.eye(v.shape[1]))) > ORTHONORMAL_TOL:
            raise ValueError("Contrast matrix columns are not orthonormal")
        if np.max(np.abs(v.sum(axis=0))) > ORTHONORMAL_TOL:
            raise ValueError("Contrast matrix columns do not sum to zero")
        object.__setattr__(self, "v", v)

    @property
    def n_parts(self) -> int:
        return self.v.shape[0]


def close(x: "CountVector", zero_replacement: float = DEFAULT_ZERO_REPLACEMENT) -> Composition:
    """Close a count vector onto the simplex.

    Zero counts are replaced by ``zero_replacement`` and the result is divided by the
    adjusted total (counts plus replacements), so it lies on the open simplex.
    """
    counts = np.asarray(x.counts, dtype=np.float64)
    if zero_replacement < 0:
        raise ValueError("zero_replacement must be nonnegative")
    adjusted = np.where(counts == 0, zero_replacement, counts)
    if np.any(adjusted <= 0):
        raise ValueError("Zero counts need a positive zero_replacement")
    return Composition(adjusted / adjusted.sum())


def replace_zeros(
    counts: np.ndarray,
    zero_replacement: float = DEFAULT_ZERO_REPLACEMENT,
    zero_policy: ZeroPolicy = ZeroPolicy.RENORMALIZE,
) -> np.ndarray:
    """Row-wise closure of an (n, J) count matrix with zero replacement.

    ``RENORMALIZE`` divides each row by its adjusted sum; ``DIVIDE_BY_ORIGINAL_TOTAL`` divides
    by the original count total, so rows with zeros sum to slightly more than one.
    """
    counts = np.asarray(counts, dtype=np.float64)
    adjusted = np.where(counts == 0, zero_replacement, counts)
    if np.any(adjusted <= 0):
        raise ValueError("Zero counts need a positive zero_replacement")
    if ZeroPolicy(zero_policy) is ZeroPolicy.RENORMALIZE:
        totals = adjusted.sum(axis=-1, keepdims=True)
    else:
        totals = counts.sum(axis=-1, keepdims=True)
        if np.any(totals <= 0):
            raise ValueError("divide_by_original_total needs a positive count total")
    return adjusted / totals


def pivotal_sbp(n_parts: int) -> SbpMatrix:
    """Pivotal partition: column k is +1 in row k, -1 below and 0 above."""
    if n_parts < 2:
        raise ValueError(f"A partition needs at least 2 parts, got {n_parts}")
    psi = np.zeros((n_parts, n_parts - 1), dtype=np.int8)
    for k in range(n_parts - 1):
        psi[k, k] = 1
        psi[k + 1 :, k] = -1
    return SbpMatrix(psi)


def validate_sbp(psi) -> SbpReport:
    """Check that ``psi`` encodes a sequential binary partition.

    Each column must hold both signs, the first column must have no zeros, and the
    support of every later column must equal the +1 set or the -1 set of exactly one
    earlier column (no group split twice).
    """
    psi = np.asarray(psi)
    if psi.ndim != 2 or psi.shape[0] < 2 or psi.shape[1] != psi.shape[0] - 1:
        return SbpReport(False, None, f"shape must be J x (J-1), got {psi.shape}")
    if not np.all(np.isin(psi, (-1, 0, 1))):
        return SbpReport(False, None, "entries must be in {-1, 0, +1}")

    groups: list[frozenset] = []
    supports: set[frozenset] = set()
    for k in range(psi.shape[1]):
        col = psi[:, k]
        plus = frozenset(np.flatnonzero(col == 1).tolist())
        minus = frozenset(np.flatnonzero(col == -1).tolist())
        if not plus:
            return SbpReport(False, k, "column lacks +1")
        if not minus:
            return SbpReport(False, k, "column lacks -1")
        support = plus | minus
        if k == 0:
            if len(support) != psi.shape[0]:
                return SbpReport(False, k, "first column has zeros")
        else:
            if sum(1 for g in groups if g == support) != 1:
                return SbpReport(False, k, "not sequential")
            if support in supports:
                return SbpReport(False, k, "group already split")
        supports.add(support)
        groups.extend((plus, minus))
    return SbpReport(True)


def _coerce_sbp(psi) -> SbpMatrix:
    return psi if isinstance(psi, SbpMatrix) else SbpMatrix(psi)


def contrast_matrix(psi) -> ContrastMatrix:
    """Orthonormal contrast matrix V of an SBP.

    Entries are ``+sqrt(n-/(n+(n+ + n-)))`` where psi is +1, ``-sqrt(n+/(n-(n+ + n-)))``
    where psi is -1, and 0 elsewhere.
    """
    sbp = _coerce_sbp(psi)
    signs = sbp.psi.astype(np.float64)
    n_plus = (signs > 0).sum(axis=0)
    n_minus = (signs < 0).sum(axis=0)
    n_total = n_plus + n_minus
    plus_value = np.sqrt(n_minus / (n_plus * n_total))
    minus_value = np.sqrt(n_plus / (n_minus * n_total))
    v = np.where(signs > 0, plus_value, 0.0) - np.where(signs < 0, minus_value, 0.0)
    return ContrastMatrix(v)


def ilr(p: Composition, v: ContrastMatrix) -> IlrVector:
    """ilr coordinates ``V' ln(p)``."""
    if p.dim != v.n_parts:
        raise DimensionMismatchError(f"Composition has {p.dim} parts, contrast matrix expects {v.n_parts}")
    return IlrVector(v.v.T @ np.log(p.parts))


def ilr_batch(proportions: np.ndarray, v: ContrastMatrix) -> np.ndarray:
    """ilr coordinates of each row of an (n, J) array of positive proportions."""
    proportions = np.asarray(proportions, dtype=np.float64)
    if proportions.shape[-1] != v.n_parts:
        raise DimensionMismatchError(
            f"Proportions have {proportions.shape[-1]} parts, contrast matrix expects {v.n_parts}"
        )
    return np.log(proportions) @ v.v


def ilr_balances(p: Composition, psi) -> IlrVector:
    """ilr coordinates as balances of geometric means of the +1 and -1 groups."""
    sbp = _coerce_sbp(psi)
    if p.dim != sbp.n_parts:
        raise DimensionMismatchError(f"Composition has {p.dim} parts, SBP expects {sbp.n_parts}")
    logs = np.log(p.parts)
    coords = np.empty(sbp.psi.shape[1])
    for k in range(sbp.psi.shape[1]):
        plus = sbp.psi[:, k] == 1
        minus = sbp.psi[:, k] == -1
        n_plus, n_minus = int(plus.sum()), int(minus.sum())
        scale = np.sqrt(n_plus * n_minus / (n_plus + n_minus))
        coords[k] = scale * (logs[plus].mean() - logs[minus].mean())
    return IlrVector(coords)


def inverse_ilr(m: IlrVector, v: ContrastMatrix) -> Composition:
    """Map ilr coordinates back to the simplex: ``closure(exp(V m))``.

    Raises:
        CompositionUnderflowError: some part underflows to zero for extreme coordinates.
    """
    if m.coords.size != v.v.shape[1]:
        raise DimensionMismatchError(f"Got {m.coords.size} coordinates, contrast matrix expects {v.v.shape[1]}")
    parts = softmax(v.v @ m.coords)
    if not np.all(np.isfinite(parts)) or np.any(parts <= 0.0):
        raise CompositionUnderflowError("ilr coordinates too extreme: a part underflows to zero")
    return Composition(parts / parts.sum())
