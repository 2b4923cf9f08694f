"""KMS detailed-balance residual.

The Heisenberg generator ``L^dag`` is KMS self-adjoint when
``<A, L^dag(B)>_sigma = <L^dag(A), B>_sigma`` for the inner product
``<A, B>_sigma = Tr[A^dag sigma^(1/2) B sigma^(1/2)]``. In vectorized form the
Gram matrix is ``Gamma = (sigma^(1/2))^T (x) sigma^(1/2)`` and the condition
reads ``Gamma L^H = L Gamma``.
"""

import logging

import logfire
import numpy as np

from lindblad_lab.core.exceptions import DomainError
from lindblad_lab.densemath import DensityMatrix, dagger, kron
from lindblad_lab.engine.superoperator import SuperOperator, assemble
from lindblad_lab.jumps.types import LindbladSpec

logger = logging.getLogger(__name__)


def kms_residual(spec: LindbladSpec | SuperOperator, sigma: DensityMatrix) -> float:
    """``max |<E_a, L^dag E_b>_sigma - <L^dag E_a, E_b>_sigma|`` over matrix units of the sigma eigenbasis.

    Exact populations carried by ``sigma`` are used, so tiny Gibbs weights
    keep their relative accuracy.

    Raises:
        DomainError: ``sigma`` is rank deficient.
    """
    superop = spec if isinstance(spec, SuperOperator) else assemble(spec)
    populations, basis = sigma.spectral()
    if np.min(populations) <= 0.0:
        raise DomainError("KMS residual needs a full-rank state", details={"min_population": float(np.min(populations))})

    with logfire.span("kms_residual", dim=superop.dim):
        # columns of kron(conj(U), U) are vec(|u_a><u_b|)
        units = kron(basis.conj(), basis)
        l_hat = dagger(units) @ superop.mat @ units
        root = np.sqrt(populations)
        gram = np.kron(root, root)
        defect = gram[:, None] * dagger(l_hat) - l_hat * gram[None, :]
        residual = float(np.max(np.abs(defect)))
    logger.debug("KMS residual evaluated", extra={"residual": residual})
    return residual
