import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ilr_approx.constants import JACOBI_MAX_SWEEPS, JACOBI_REL_THRESHOLD, SYMMETRY_TOL
from ilr_approx.errors import DimensionMismatchError, EigenConvergenceError


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Dense real symmetric matrix.

    The stored entries are exactly symmetric: inputs that are symmetric up to roundoff
    are replaced by ``(M + M') / 2``.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatchError(f"SymmetricMatrix needs a non-empty square array, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m)))) if np.all(np.isfinite(m)) else 1.0
        if np.any(np.abs(m - m.T) > SYMMETRY_TOL * scale):
            raise ValueError("Matrix is not symmetric")
        m = (m + m.T) / 2.0
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def sym_eigen(s: SymmetricMatrix, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenResult:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit the pairs (p, q), p < q, in row order. Iteration stops once the Frobenius
    norm of the off-diagonal part drops to ``1e-14 * ||S||_F``.

    Raises:
        EigenConvergenceError: the threshold was not reached within ``max_sweeps`` sweeps.
    """
    a = np.array(s.entries, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise ValueError("sym_eigen needs finite entries")
    n = a.shape[0]
    q = np.eye(n)
    threshold = JACOBI_REL_THRESHOLD * float(np.linalg.norm(a))
    eps = np.finfo(np.float64).eps

    sweeps = 0
    off = _off_norm(a)
    while off > threshold:
        if sweeps >= max_sweeps:
            raise EigenConvergenceError(sweeps, off)
        sweeps += 1
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                # negligible against both diagonal entries: drop it
                if sweeps > 4 and abs(apr) <= eps * abs(a[p, p]) and abs(apr) <= eps * abs(a[r, r]):
                    a[p, r] = a[r, p] = 0.0
                    continue
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = (1.0 if theta >= 0.0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c

                col_p = a[:, p].copy()
                col_r = a[:, r].copy()
                a[:, p] = c * col_p - sn * col_r
                a[:, r] = sn * col_p + c * col_r
                row_p = a[p, :].copy()
                row_r = a[r, :].copy()
                a[p, :] = c * row_p - sn * row_r
                a[r, :] = sn * row_p + c * row_r
                a[p, r] = a[r, p] = 0.0

                vec_p = q[:, p].copy()
                vec_r = q[:, r].copy()
                q[:, p] = c * vec_p - sn * vec_r
                q[:, r] = sn * vec_p + c * vec_r
        off = _off_norm(a)

    logging.debug(f"Jacobi converged after {sweeps} sweeps (dim {n})")
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return EigenResult(eigenvalues=values[order], eigenvectors=q[:, order])


def quadratic_form(a: np.ndarray, d: np.ndarray, middle: Optional[np.ndarray] = None) -> SymmetricMatrix:
    """Return ``A' diag(d) A``, or the sandwich ``A' diag(d) M diag(d) A`` when ``middle`` is given.

    The result is symmetrised as ``(R + R') / 2``.
    """
    a = np.asarray(a, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if a.ndim != 2 or d.ndim != 1 or a.shape[0] != d.shape[0]:
        raise DimensionMismatchError(f"quadratic_form: A has shape {a.shape}, d has shape {d.shape}")
    scaled = a * d[:, np.newaxis]
    if middle is None:
        result = a.T @ scaled
    else:
        m = np.asarray(middle, dtype=np.float64)
        if m.shape != (d.shape[0], d.shape[0]):
            raise DimensionMismatchError(f"quadratic_form: middle has shape {m.shape}, expected {(d.shape[0],) * 2}")
        result = scaled.T @ m @ scaled
    return SymmetricMatrix((result + result.T) / 2.0)
