from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ilr_approx.composition.composition import SbpReport


class IlrApproxError(Exception):
    """Base class for all errors raised by ilr-approx."""


class DimensionMismatchError(IlrApproxError, ValueError):
    """Operands have non-conformable shapes."""


class EigenConvergenceError(IlrApproxError, ArithmeticError):
    """Cyclic Jacobi did not reach the off-diagonal threshold."""

    def __init__(self, sweeps: int, off_norm: float):
        self.sweeps = sweeps
        self.off_norm = off_norm
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
        )


class InvalidSbpError(IlrApproxError, ValueError):
    """A sign matrix is not a sequential binary partition."""

    def __init__(self, report: "SbpReport"):
        self.report = report
        super().__init__(f"Invalid SBP: {report.message}")


class CompositionUnderflowError(IlrApproxError, ArithmeticError):
    """ilr coordinates too extreme to map back onto the open simplex."""


class InstanceTooLargeError(IlrApproxError, ValueError):
    """Exact enumeration would visit more compositions than allowed."""

    def __init__(self, n_compositions: int, limit: int):
        self.n_compositions = n_compositions
        self.limit = limit
        super().__init__(f"Enumeration needs {n_compositions} compositions, limit is {limit}")


class EnumerationMassError(IlrApproxError, ArithmeticError):
    """Enumerated outcome probabilities do not sum to one."""

    def __init__(self, mass: float):
        self.mass = mass
        super().__init__(f"Enumerated probability mass is {mass:.12f}, expected 1")


class ConfigError(IlrApproxError, ValueError):
    """Run configuration is malformed or out of range."""


class UnknownReferenceError(IlrApproxError, LookupError):
    """A scenario label or coordinate index does not exist."""
