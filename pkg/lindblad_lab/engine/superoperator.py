"""Vectorized Lindbladian and its matrix-free action."""

import logging
from dataclasses import dataclass

import logfire
import numpy as np
import scipy.linalg

from lindblad_lab.core.exceptions import DimensionError
from lindblad_lab.core.tolerances import MAX_SUPEROPERATOR_DIM
from lindblad_lab.densemath import (
    ComplexMatrix,
    ComplexVector,
    DensityMatrix,
    as_density,
    commutator,
    dagger,
    kron,
    unvectorize,
    vectorize,
)
from lindblad_lab.jumps.types import LindbladSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuperOperator:
    """Column-stacked matrix of ``L``: ``vec(L(X)) = mat @ vec(X)``.

    Attributes:
        dim: System dimension ``d``.
        mat: ``d^2 x d^2`` matrix.
    """

    dim: int
    mat: ComplexMatrix

    def __post_init__(self) -> None:
        if self.mat.shape != (self.dim**2, self.dim**2):
            raise DimensionError("Superoperator shape does not match dim", details={"dim": self.dim, "shape": self.mat.shape})
        self.mat.setflags(write=False)

    def act(self, x: ComplexMatrix) -> ComplexMatrix:
        return unvectorize(self.mat @ vectorize(x))

    def eigenvalues(self) -> ComplexVector:
        return np.asarray(scipy.linalg.eigvals(self.mat), dtype=np.complex128)

    def trace_defect(self) -> float:
        """``max |vec(I)^dag mat|``; zero for a trace-preserving generator."""
        identity = vectorize(np.eye(self.dim, dtype=np.complex128))
        return float(np.max(np.abs(identity.conj() @ self.mat)))


def check_superoperator_dim(dim: int) -> None:
    if dim > MAX_SUPEROPERATOR_DIM:
        raise DimensionError(
            "System too large for a dense superoperator; use the matrix-free path",
            details={"dim": dim, "cap": MAX_SUPEROPERATOR_DIM},
        )


def assemble(spec: LindbladSpec) -> SuperOperator:
    """Dense superoperator of ``spec`` with weights folded in as ``sqrt(w) K``.

    Raises:
        DimensionError: ``d`` exceeds the superoperator guard.
    """
    d = spec.dim
    check_superoperator_dim(d)
    identity = np.eye(d, dtype=np.complex128)
    with logfire.span("assemble_superoperator", dim=d, jumps=len(spec.jumps)):
        g = spec.coherent
        mat = -1j * (kron(identity, g) - kron(g.T, identity))
        for jump in spec.jumps:
            if jump.weight == 0.0:
                continue
            k = jump.scaled_operator
            kk = dagger(k) @ k
            mat += kron(k.conj(), k) - 0.5 * (kron(identity, kk) + kron(kk.T, identity))
    logger.debug("Superoperator assembled", extra={"dim": d, "jumps": len(spec.jumps)})
    return SuperOperator(dim=d, mat=mat)


def apply(spec: LindbladSpec, rho: DensityMatrix | ComplexMatrix) -> ComplexMatrix:
    """Matrix-free ``L(rho)``."""
    x = as_density(rho)
    if x.shape != (spec.dim, spec.dim):
        raise DimensionError("State dimension differs from the Lindbladian", details={"state": x.shape, "dim": spec.dim})
    out = -1j * commutator(spec.coherent, x)
    for jump in spec.jumps:
        if jump.weight == 0.0:
            continue
        k = jump.operator
        kk = dagger(k) @ k
        out += jump.weight * (k @ x @ dagger(k) - 0.5 * (kk @ x + x @ kk))
    return out
