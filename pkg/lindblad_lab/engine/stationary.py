"""Fixed points and the spectral gap of an assembled Lindbladian."""

import logging
from dataclasses import dataclass

import logfire
import numpy as np
import scipy.linalg

from lindblad_lab.core.exceptions import NoFixedPointError
from lindblad_lab.core.tolerances import NULL_EIGENVALUE_TOL
from lindblad_lab.densemath import ComplexVector, DensityMatrix, dagger, hermitian_part, unvectorize
from lindblad_lab.engine.superoperator import SuperOperator, assemble
from lindblad_lab.jumps.types import LindbladSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StationaryResult:
    """Stationary state with spectral diagnostics.

    Attributes:
        state: Fixed point (Hermitized, positivity-projected, normalized).
        gap: ``-max Re(lambda)`` over non-null eigenvalues; ``inf`` when all are null.
        unique: The null space is one-dimensional.
        null_dim: Number of eigenvalues with ``|lambda| <= 1e-8``.
        eigenvalues: Full spectrum of the superoperator.
    """

    state: DensityMatrix
    gap: float
    unique: bool
    null_dim: int
    eigenvalues: ComplexVector


def _project_to_state(vec: ComplexVector) -> DensityMatrix:
    m = unvectorize(vec)
    m = hermitian_part(m / np.trace(m))
    values, vectors = scipy.linalg.eigh(m)
    values = np.clip(values, 0.0, None)
    m = hermitian_part((vectors * values) @ dagger(vectors))
    return DensityMatrix(m / np.real(np.trace(m)))


def stationary_state(target: SuperOperator | LindbladSpec) -> StationaryResult:
    """Null vector of the superoperator turned into a density matrix.

    When the null space is degenerate the eigenvector with the largest trace
    is used.

    Raises:
        NoFixedPointError: No eigenvalue within 1e-8 of zero.
    """
    superop = target if isinstance(target, SuperOperator) else assemble(target)
    with logfire.span("stationary_state", dim=superop.dim):
        values, vectors = scipy.linalg.eig(superop.mat)
    null = np.nonzero(np.abs(values) <= NULL_EIGENVALUE_TOL)[0]
    if null.size == 0:
        raise NoFixedPointError(
            "Superoperator has no zero eigenvalue",
            details={"smallest_modulus": float(np.min(np.abs(values)))},
        )

    identity = np.eye(superop.dim, dtype=np.complex128).reshape(-1, order="F")
    traces = np.abs(identity @ vectors[:, null])
    chosen = int(null[int(np.argmax(traces))])
    state = _project_to_state(vectors[:, chosen])

    rest = np.delete(values, null)
    gap = float(-np.max(rest.real)) if rest.size else float("inf")
    result = StationaryResult(
        state=state,
        gap=gap,
        unique=null.size == 1,
        null_dim=int(null.size),
        eigenvalues=np.asarray(values, dtype=np.complex128),
    )
    if not result.unique:
        logger.warning("Fixed point is not unique", extra={"null_dim": result.null_dim})
    logger.debug("Stationary state found", extra={"gap": gap, "null_dim": result.null_dim})
    return result
