"""Singular-vector jumps and the grid search for non-normal eigenvectors.

The smallest right singular vector of ``T`` is the ground state of the
positive semidefinite ``T^dag T``, so the ground-state machinery applies.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import logfire
import numpy as np
import numpy.typing as npt
import scipy.linalg

from lindblad_lab.core.exceptions import DomainError, ParameterError
from lindblad_lab.core.tolerances import DEGENERACY_TOL
from lindblad_lab.densemath import ComplexMatrix, ComplexVector, DensityMatrix, as_matrix, dagger
from lindblad_lab.filters import FilterSpec, ground_filter
from lindblad_lab.jumps.ground import check_filter_gap, check_nondegenerate_ground, filtered_jump
from lindblad_lab.jumps.types import LindbladSpec, WeightedJump
from lindblad_lab.models import Coupling, HamiltonianSpec, default_couplings

logger = logging.getLogger(__name__)

# s_min values this close to the minimum count as a tie
_TIE_TOL = 1e-12


def gram_hamiltonian(t: npt.ArrayLike) -> HamiltonianSpec:
    """``T^dag T`` wrapped as a Hamiltonian."""
    m = as_matrix(t, square=True)
    return HamiltonianSpec.from_dense(dagger(m) @ m, name="gram")


def _is_scalar_spectrum(h: HamiltonianSpec) -> bool:
    values = h.spectrum.eigenvalues
    return float(values[-1] - values[0]) <= DEGENERACY_TOL * max(1.0, float(np.max(np.abs(values))))


def _gram_filter(h: HamiltonianSpec) -> FilterSpec:
    gap = check_nondegenerate_ground(h.spectrum, what="smallest singular value")
    return ground_filter(min(0.9 * gap, 2.0 * h.e_max), h.e_max)


def default_singular_filter(t: npt.ArrayLike) -> FilterSpec:
    """Ground filter for ``T^dag T``: width ``0.9 gap``, bound ``||T||^2``."""
    return _gram_filter(gram_hamiltonian(t))


def _gram_jump(h: HamiltonianSpec, a: npt.ArrayLike, filt: FilterSpec | None) -> ComplexMatrix:
    if _is_scalar_spectrum(h):
        logger.warning("T^dag T is scalar; every state is a ground state", extra={"dim": h.dim})
        return np.zeros((h.dim, h.dim), dtype=np.complex128)
    gap = check_nondegenerate_ground(h.spectrum, what="smallest singular value")
    filt = filt or _gram_filter(h)
    check_filter_gap(gap, filt)
    return filtered_jump(h.spectrum, a, filt)


def singular_jump(t: npt.ArrayLike, a: npt.ArrayLike, filt: FilterSpec | None = None) -> ComplexMatrix:
    """Ground-state jump of ``T^dag T``.

    A scalar ``T^dag T`` (unitary ``T`` up to scale) has only zero Bohr
    frequencies and gives ``K = 0``.

    Raises:
        DomainError: The smallest singular value is degenerate while larger
            ones exist.
    """
    return _gram_jump(gram_hamiltonian(t), a, filt)


def singular_lindbladian(
    t: npt.ArrayLike,
    couplings: Sequence[Coupling] | None = None,
    filt: FilterSpec | None = None,
    *,
    seed: int = 0,
) -> LindbladSpec:
    """One singular jump per coupling with ``G = T^dag T``."""
    h = gram_hamiltonian(t)
    couplings = list(couplings) if couplings is not None else default_couplings(h.dim, seed)
    if filt is None and not _is_scalar_spectrum(h):
        filt = _gram_filter(h)
    with logfire.span("singular_lindbladian", dim=h.dim, couplings=len(couplings)):
        jumps = [WeightedJump(_gram_jump(h, c.operator, filt), 1.0, c.label) for c in couplings]
    return LindbladSpec(coherent=h.dense, jumps=tuple(jumps), label="singular")


def smallest_singular_vector(t: npt.ArrayLike) -> ComplexVector:
    """Right singular vector of the smallest singular value (the SVD oracle)."""
    _, _, vh = scipy.linalg.svd(as_matrix(t, square=True))
    return dagger(vh)[:, -1]


# === Non-normal eigenvector search ===


def complex_grid(center: complex, radius: float, points: int) -> list[complex]:
    """``points x points`` square grid around ``center`` in row-major order (imaginary part outer)."""
    if points < 1:
        raise ParameterError("Grid needs at least one point per side", details={"points": points})
    if points == 1:
        return [complex(center)]
    offsets = np.linspace(-radius, radius, points)
    return [complex(center) + complex(re, im) for im in offsets for re in offsets]


@dataclass(frozen=True)
class NonnormalSearchResult:
    """Outcome of the eigenvalue grid search.

    Attributes:
        best_lambda: Grid point with the smallest ``s_min(A - lambda I)``.
        best_index: Its position in the grid.
        s_min: Smallest singular value for every grid point, in grid order.
        eigvec: Prepared unit vector (dominant eigenvector of the stationary state).
        residual: ``||A v - lambda v||``.
        ambiguous: More than one grid point attains the minimum within 1e-12.
        state: Stationary state of the singular dynamics at ``best_lambda``.
    """

    best_lambda: complex
    best_index: int
    s_min: npt.NDArray[np.float64]
    eigvec: ComplexVector
    residual: float
    ambiguous: bool
    state: DensityMatrix


def s_min_curve(a_mat: ComplexMatrix, lambda_grid: Sequence[complex]) -> npt.NDArray[np.float64]:
    identity = np.eye(a_mat.shape[0], dtype=np.complex128)
    return np.array([float(scipy.linalg.svdvals(a_mat - lam * identity)[-1]) for lam in lambda_grid])


def nonnormal_eigvec_search(
    a_mat: npt.ArrayLike,
    lambda_grid: Sequence[complex],
    couplings: Sequence[Coupling] | None = None,
    filt: FilterSpec | None = None,
    *,
    seed: int = 0,
) -> NonnormalSearchResult:
    """Locate an eigenpair of a non-normal matrix by minimizing ``s_min(A - lambda I)``.

    The singular dynamics for ``T = A - lambda* I`` is run to stationarity
    at the minimizing grid point and the prepared vector is read off.
    Ties select the first grid point and set ``ambiguous``.

    Raises:
        DomainError: The stationary state at the chosen point is not unique,
            for instance a single coupling against a degenerate excited level.
    """
    from lindblad_lab.engine.stationary import stationary_state

    a = as_matrix(a_mat, square=True)
    if not lambda_grid:
        raise ParameterError("The lambda grid is empty")

    with logfire.span("nonnormal_eigvec_search", dim=a.shape[0], points=len(lambda_grid)):
        curve = s_min_curve(a, lambda_grid)
        best_index = int(np.argmin(curve))
        ties = np.nonzero(curve <= curve[best_index] + _TIE_TOL)[0]
        ambiguous = ties.size > 1
        if ambiguous:
            logger.warning(
                "Several grid points attain the minimal singular value",
                extra={"ties": ties.tolist(), "s_min": float(curve[best_index])},
            )
        best_lambda = complex(lambda_grid[best_index])
        t = a - best_lambda * np.eye(a.shape[0], dtype=np.complex128)
        spec = singular_lindbladian(t, couplings, filt, seed=seed)
        stationary = stationary_state(spec)
        if not stationary.unique:
            raise DomainError(
                "Stationary state of the singular dynamics is not unique; the prepared vector is undetermined",
                details={"lambda": str(best_lambda), "null_dim": stationary.null_dim, "couplings": len(spec.jumps)},
            )
        state = stationary.state

    values, vectors = scipy.linalg.eigh(state.mat)
    v = vectors[:, int(np.argmax(values))]
    residual = float(np.linalg.norm(a @ v - best_lambda * v))
    logger.info(
        "Non-normal search finished",
        extra={"lambda": str(best_lambda), "s_min": float(curve[best_index]), "residual": residual},
    )
    return NonnormalSearchResult(
        best_lambda=best_lambda,
        best_index=best_index,
        s_min=curve,
        eigvec=v,
        residual=residual,
        ambiguous=ambiguous,
        state=state,
    )
