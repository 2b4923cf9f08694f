"""Dense complex linear algebra shared by every other module.

Conventions:
    * Operators are ``numpy`` arrays of dtype ``complex128`` (``ComplexMatrix``).
    * Vectorization stacks columns: ``vectorize(A @ X @ B) == kron(B.T, A) @ vectorize(X)``.
    * In a tensor product the first factor is the leftmost subsystem.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import reduce
from typing import TypeAlias

import numpy as np
import numpy.typing as npt
import scipy.linalg

from lindblad_lab.core.exceptions import DimensionError, DomainError, InvariantViolationError
from lindblad_lab.core.tolerances import (
    EIGH_INPUT_TOL,
    HERMITIAN_TOL,
    MAX_KRON_ENTRIES,
    PSD_FLOOR,
    TRACE_DRIFT_ABORT,
    TRACE_TOL,
)

ComplexMatrix: TypeAlias = npt.NDArray[np.complex128]
ComplexVector: TypeAlias = npt.NDArray[np.complex128]
RealVector: TypeAlias = npt.NDArray[np.float64]


def as_matrix(m: npt.ArrayLike, *, square: bool = False) -> ComplexMatrix:
    """Coerce to a finite 2-D complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"Expected a matrix, got an array with shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("Matrix has non-finite entries")
    return arr


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return m.conj().T


def hermitian_part(m: ComplexMatrix) -> ComplexMatrix:
    return 0.5 * (m + dagger(m))


def hermiticity_defect(m: ComplexMatrix) -> float:
    """Largest entrywise deviation ``max |M - M^dagger|``."""
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return a @ b - b @ a


def operator_norm(m: ComplexMatrix) -> float:
    """Spectral norm (largest singular value)."""
    if m.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(m)[0])


def trace_norm(m: ComplexMatrix) -> float:
    """Schatten-1 norm: the sum of singular values."""
    return float(np.sum(scipy.linalg.svdvals(m)))


# === Decompositions ===


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectrum of a Hermitian matrix.

    Attributes:
        eigenvalues: Real eigenvalues in ascending order.
        eigenvectors: Unitary matrix whose columns are the matching eigenvectors.
    """

    eigenvalues: RealVector
    eigenvectors: ComplexMatrix

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def to_eigenbasis(self, m: ComplexMatrix) -> ComplexMatrix:
        """Matrix elements ``<v_i| M |v_j>``."""
        return dagger(self.eigenvectors) @ m @ self.eigenvectors

    def from_eigenbasis(self, m: ComplexMatrix) -> ComplexMatrix:
        return self.eigenvectors @ m @ dagger(self.eigenvectors)

    def apply_function(self, values: npt.ArrayLike) -> ComplexMatrix:
        """``V diag(values) V^dagger`` for per-eigenvalue function values."""
        v = self.eigenvectors
        return (v * np.asarray(values)) @ dagger(v)


@dataclass(frozen=True)
class SVDResult:
    """Full singular value decomposition ``T = U diag(s) V^dagger``.

    Attributes:
        singular_values: Nonnegative, descending.
        left_vectors: ``U``; column ``i`` is ``u_i``.
        right_vectors: ``V``; column ``i`` is ``v_i`` with ``T v_i = s_i u_i``.
    """

    singular_values: RealVector
    left_vectors: ComplexMatrix
    right_vectors: ComplexMatrix

    @property
    def smallest_right_vector(self) -> ComplexVector:
        """Right singular vector of the smallest singular value (columns of a square T)."""
        k = self.singular_values.shape[0] - 1
        return self.right_vectors[:, k]


def eig_hermitian(h: npt.ArrayLike) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = as_matrix(h, square=True)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    defect = hermiticity_defect(m)
    if defect > EIGH_INPUT_TOL * scale:
        raise DomainError(
            "eig_hermitian received a non-Hermitian matrix",
            details={"hermiticity_defect": defect},
        )
    values, vectors = scipy.linalg.eigh(hermitian_part(m))
    return EigenDecomposition(eigenvalues=values, eigenvectors=vectors)


def svd(t: npt.ArrayLike) -> SVDResult:
    """Full SVD with singular values in descending order."""
    m = as_matrix(t)
    u, s, vh = scipy.linalg.svd(m, full_matrices=True)
    return SVDResult(singular_values=s, left_vectors=u, right_vectors=dagger(vh))


def expm(m: npt.ArrayLike) -> ComplexMatrix:
    """Matrix exponential (scaling and squaring with a Pade core)."""
    return np.asarray(scipy.linalg.expm(as_matrix(m, square=True)), dtype=np.complex128)


def psd_sqrt(m: ComplexMatrix) -> ComplexMatrix:
    """Square root of a positive semidefinite matrix, negative noise clipped."""
    values, vectors = scipy.linalg.eigh(hermitian_part(m))
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ dagger(vectors)


# === Tensor structure ===


def kron(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    """Kronecker product guarded by ``MAX_KRON_ENTRIES``."""
    ma, mb = as_matrix(a), as_matrix(b)
    entries = ma.size * mb.size
    if entries > MAX_KRON_ENTRIES:
        raise DimensionError(
            "Kronecker product exceeds the dimension cap",
            details={"entries": entries, "cap": MAX_KRON_ENTRIES},
        )
    return np.kron(ma, mb)


def kron_all(factors: Sequence[npt.ArrayLike]) -> ComplexMatrix:
    if not factors:
        raise DimensionError("kron_all needs at least one factor")
    return reduce(kron, factors[1:], as_matrix(factors[0]))


def partial_trace(m: npt.ArrayLike, dims: Sequence[int], keep: Sequence[int]) -> ComplexMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Args:
        m: Operator on the product space ``dims[0] x dims[1] x ...``.
        dims: Subsystem dimensions, leftmost factor first.
        keep: Subsystems to keep; the result orders them ascending.

    Returns:
        Reduced operator on the kept subsystems.
    """
    mat = as_matrix(m, square=True)
    dims = [int(d) for d in dims]
    total = math.prod(dims)
    if total != mat.shape[0] or any(d < 1 for d in dims):
        raise DimensionError(
            "Subsystem dimensions do not match the operator",
            details={"dims": dims, "shape": mat.shape},
        )
    kept = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in kept):
        raise DimensionError("Subsystem index out of range", details={"keep": list(keep)})
    traced = [k for k in range(len(dims)) if k not in kept]

    n = len(dims)
    order = kept + traced
    tensor = mat.reshape(dims + dims).transpose(order + [n + k for k in order])
    d_keep = math.prod(dims[k] for k in kept)
    d_trace = math.prod(dims[k] for k in traced)
    tensor = tensor.reshape(d_keep, d_trace, d_keep, d_trace)
    return np.trace(tensor, axis1=1, axis2=3)


def vectorize(m: npt.ArrayLike) -> ComplexVector:
    """Column-stacking vectorization."""
    return as_matrix(m).reshape(-1, order="F")


def unvectorize(v: npt.ArrayLike) -> ComplexMatrix:
    """Inverse of ``vectorize`` for square matrices."""
    vec = np.asarray(v, dtype=np.complex128).reshape(-1)
    d = math.isqrt(vec.shape[0])
    if d * d != vec.shape[0]:
        raise DimensionError(f"Vector length {vec.shape[0]} is not a perfect square")
    return vec.reshape(d, d, order="F")


# === States ===


@dataclass(frozen=True)
class DensityMatrix:
    """Positive semidefinite, unit-trace operator.

    Construction validates Hermiticity, trace and the positivity floor and
    freezes the underlying array. ``populations`` and ``basis`` optionally
    carry an exact spectral decomposition (kept for Gibbs states whose tiny
    populations cannot be recovered from the dense matrix).
    """

    mat: ComplexMatrix
    populations: RealVector | None = field(default=None, compare=False, repr=False)
    basis: ComplexMatrix | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        m = np.array(as_matrix(self.mat, square=True), copy=True)
        defect = hermiticity_defect(m)
        if defect > HERMITIAN_TOL:
            raise DomainError("Density matrix is not Hermitian", details={"defect": defect})
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > TRACE_TOL:
            raise DomainError("Density matrix trace differs from 1", details={"trace": trace})
        floor = float(np.min(scipy.linalg.eigvalsh(m)))
        if floor < PSD_FLOOR:
            raise DomainError("Density matrix is not positive semidefinite", details={"min_eigenvalue": floor})
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return int(self.mat.shape[0])

    def spectral(self) -> tuple[RealVector, ComplexMatrix]:
        """Eigenvalues and eigenvectors, exact ones when they were supplied."""
        if self.populations is not None and self.basis is not None:
            return self.populations, self.basis
        values, vectors = scipy.linalg.eigh(self.mat)
        return values, vectors

    def expectation(self, op: ComplexMatrix) -> float:
        return float(np.real(np.trace(self.mat @ op)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    # --- constructors ---

    @classmethod
    def pure(cls, psi: npt.ArrayLike) -> "DensityMatrix":
        vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise DomainError("Cannot build a pure state from the zero vector")
        vec = vec / norm
        return cls(hermitian_part(np.outer(vec, vec.conj())))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "DensityMatrix":
        if not 0 <= index < dim:
            raise DimensionError(f"Basis index {index} out of range for dimension {dim}")
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[index, index] = 1.0
        return cls(m)

    @classmethod
    def haar_random(cls, dim: int, seed: int) -> "DensityMatrix":
        """Haar-random pure state (normalized complex Gaussian vector)."""
        rng = np.random.default_rng(seed)
        psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return cls.pure(psi)

    @classmethod
    def from_propagated(cls, m: npt.ArrayLike) -> "DensityMatrix":
        """Re-Hermitize and renormalize a propagated state.

        Raises:
            InvariantViolationError: If the trace drifted by more than
                ``TRACE_DRIFT_ABORT`` or an eigenvalue fell below ``PSD_FLOOR``.
        """
        mat = hermitian_part(as_matrix(m, square=True))
        trace = float(np.real(np.trace(mat)))
        drift = abs(trace - 1.0)
        if drift > TRACE_DRIFT_ABORT:
            raise InvariantViolationError("Trace drift during propagation", details={"trace_drift": drift})
        floor = float(np.min(scipy.linalg.eigvalsh(mat)))
        if floor < PSD_FLOOR:
            raise InvariantViolationError(
                "Positivity floor violated during propagation",
                details={"min_eigenvalue": floor, "trace": trace},
            )
        return cls(mat / trace)


def as_density(rho: "DensityMatrix | npt.ArrayLike") -> ComplexMatrix:
    """Raw matrix of a state given either as DensityMatrix or as an array."""
    if isinstance(rho, DensityMatrix):
        return rho.mat
    return as_matrix(rho, square=True)


def trace_distance(a: DensityMatrix | npt.ArrayLike, b: DensityMatrix | npt.ArrayLike) -> float:
    """``||a - b||_1`` as the sum of singular values (range [0, 2] for states)."""
    ma, mb = as_density(a), as_density(b)
    if ma.shape != mb.shape:
        raise DimensionError("trace_distance needs equal dimensions")
    return trace_norm(ma - mb)


def _is_pure(m: ComplexMatrix) -> bool:
    return abs(float(np.real(np.trace(m @ m))) - 1.0) <= 1e-10


def fidelity(a: DensityMatrix | npt.ArrayLike, b: DensityMatrix | npt.ArrayLike) -> float:
    """Squared Uhlmann fidelity; equals ``<psi| a |psi>`` when either side is pure."""
    ma, mb = as_density(a), as_density(b)
    if ma.shape != mb.shape:
        raise DimensionError("fidelity needs equal dimensions")
    if _is_pure(mb) or _is_pure(ma):
        return float(np.real(np.trace(ma @ mb)))
    sqrt_a = psd_sqrt(ma)
    inner = psd_sqrt(sqrt_a @ mb @ sqrt_a)
    return float(np.real(np.trace(inner)) ** 2)


def gibbs_state(h: "npt.ArrayLike | EigenDecomposition", beta: float) -> DensityMatrix:
    """``exp(-beta H) / Z`` assembled from the eigendecomposition of ``H``."""
    eig = h if isinstance(h, EigenDecomposition) else eig_hermitian(h)
    weights = np.exp(-beta * (eig.eigenvalues - eig.eigenvalues[0]))
    populations = weights / np.sum(weights)
    mat = hermitian_part(eig.apply_function(populations))
    return DensityMatrix(mat, populations=populations, basis=eig.eigenvectors)
