"""Laboratory exceptions.

Domain exceptions carry a machine-readable code and the process exit code the
CLI returns when one escapes a run.
"""

from typing import Any


class LabException(Exception):
    """Base exception for all laboratory errors.

    Attributes:
        message: Human-readable error message.
        code: Machine-readable error code, echoed in logs.
        exit_code: Exit status of the ``run`` command when this error aborts it.
        details: Additional error details (dimensions, offending values, ...).
    """

    message: str = "An error occurred"
    code: str = "LAB_ERROR"
    exit_code: int = 1

    def __init__(
        self,
        message: str | None = None,
        code: str | None = None,
        details: dict[str, Any] | None = None,
    ):
        self.message = message or self.__class__.message
        self.code = code or self.__class__.code
        self.details = details or {}
        super().__init__(self.message)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(message={self.message!r}, code={self.code!r})"


# === Input errors (exit 2) ===


class DimensionError(LabException):
    """Inconsistent or oversized dimensions."""

    message = "Dimension error"
    code = "DIMENSION_ERROR"
    exit_code = 2


class ParameterError(LabException):
    """Parameter outside its admissible range."""

    message = "Invalid parameter"
    code = "PARAMETER_ERROR"
    exit_code = 2


class DomainError(LabException):
    """Input outside the mathematical domain of an operation (degeneracy, rank, ...)."""

    message = "Input outside the operation's domain"
    code = "DOMAIN_ERROR"
    exit_code = 2


class ResolutionError(LabException):
    """Quadrature grid too coarse for the frequencies it must resolve."""

    message = "Quadrature grid under-resolves the filter"
    code = "RESOLUTION_ERROR"
    exit_code = 2


class ConfigValidationError(LabException):
    """Scenario config rejected."""

    message = "Invalid scenario config"
    code = "CONFIG_ERROR"
    exit_code = 2


# === Analysis errors ===


class FitError(LabException):
    """Not enough usable data for a fit."""

    message = "Fit failed"
    code = "FIT_ERROR"
    exit_code = 1


class NoFixedPointError(LabException):
    """Superoperator has no eigenvalue near zero."""

    message = "No fixed point found"
    code = "NO_FIXED_POINT"
    exit_code = 3


class InvariantViolationError(LabException):
    """A numerical invariant (trace drift, positivity, fixed-point residual) failed mid-run."""

    message = "Numerical invariant violated"
    code = "INVARIANT_VIOLATION"
    exit_code = 3
