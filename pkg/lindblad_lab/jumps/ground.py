"""Ground-state jump operators.

``K = sum_ij f_hat(lambda_i - lambda_j) |psi_i><psi_i| A |psi_j><psi_j|`` built
either directly in the eigenbasis of ``H`` or as the time integral
``integral f(s) exp(iHs) A exp(-iHs) ds`` on a trapezoidal grid.
"""

import logging

import logfire
import numpy as np
import numpy.typing as npt

from lindblad_lab.core.exceptions import DomainError, ParameterError
from lindblad_lab.core.tolerances import DEGENERACY_TOL
from lindblad_lab.densemath import ComplexMatrix, EigenDecomposition, RealVector, as_matrix, operator_norm
from lindblad_lab.filters import FilterKind, FilterSpec, QuadratureGrid, build_quadrature, check_resolution, phase_sum
from lindblad_lab.jumps.types import JumpBuildReport, JumpMethod
from lindblad_lab.models import HamiltonianSpec

logger = logging.getLogger(__name__)


def bohr_frequencies(eigenvalues: RealVector) -> npt.NDArray[np.float64]:
    """``nu_ij = lambda_i - lambda_j`` with near-degenerate pairs snapped to 0."""
    nu = np.subtract.outer(eigenvalues, eigenvalues)
    scale = max(1.0, float(np.max(np.abs(eigenvalues)))) if eigenvalues.size else 1.0
    nu[np.abs(nu) <= DEGENERACY_TOL * scale] = 0.0
    return nu


def check_nondegenerate_ground(eig: EigenDecomposition, what: str = "ground state") -> float:
    """Return ``lambda_1 - lambda_0``; DomainError when it vanishes."""
    values = eig.eigenvalues
    if values.shape[0] < 2:
        return float("inf")
    gap = float(values[1] - values[0])
    scale = max(1.0, float(np.max(np.abs(values))))
    if gap <= DEGENERACY_TOL * scale:
        raise DomainError(f"Degenerate {what}", details={"lambda_0": float(values[0]), "lambda_1": float(values[1])})
    return gap


def check_filter_gap(gap: float, filt: FilterSpec) -> None:
    delta = filt.params.delta
    if filt.kind is FilterKind.GROUND and delta is not None and gap < delta * (1.0 - 1e-12):
        raise ParameterError("Spectral gap is smaller than the filter width", details={"gap": gap, "delta": delta})


def filtered_jump(eig: EigenDecomposition, a: npt.ArrayLike, filt: FilterSpec) -> ComplexMatrix:
    """``V (f_hat(nu) * V^dag A V) V^dag`` for an arbitrary filter and spectrum."""
    a_eig = eig.to_eigenbasis(as_matrix(a, square=True))
    kernel = filt.freq(bohr_frequencies(eig.eigenvalues))
    return eig.from_eigenbasis(kernel * a_eig)


def annihilation_residual(k: ComplexMatrix, psi: npt.ArrayLike) -> float:
    return float(np.linalg.norm(k @ np.asarray(psi, dtype=np.complex128)))


def ground_jump_eigenbasis(
    hamiltonian: HamiltonianSpec,
    a: npt.ArrayLike,
    filt: FilterSpec,
    *,
    label: str = "",
) -> tuple[ComplexMatrix, JumpBuildReport]:
    """Eigenbasis ground-state jump.

    Rows of the eigenbasis matrix are destinations, so with eigenvalues
    ascending the result has support strictly above the diagonal.

    Raises:
        DomainError: Degenerate ground state.
        ParameterError: Spectral gap below the filter width.
    """
    eig = hamiltonian.spectrum
    check_filter_gap(check_nondegenerate_ground(eig), filt)
    with logfire.span("ground_jump_eigenbasis", dim=eig.dim, coupling=label):
        k = filtered_jump(eig, a, filt)
        residual = annihilation_residual(k, eig.eigenvectors[:, 0])
    return k, JumpBuildReport(method=JumpMethod.EIGENBASIS, annihilation_residual=residual, label=label)


def quadrature_kernel(eig: EigenDecomposition, filt: FilterSpec, grid: QuadratureGrid) -> ComplexMatrix:
    """``Phi_ij = sum_k w_k f(s_k) exp(i nu_ij s_k)``.

    Conjugating ``A`` by ``exp(iHs)`` multiplies its eigenbasis entries by
    ``exp(i nu_ij s)``, so the quadrature sum reduces to this kernel.
    """
    nu = bohr_frequencies(eig.eigenvalues)
    samples = grid.weights * filt.time(grid.nodes)
    kernel = np.empty(nu.shape, dtype=np.complex128)
    for row in range(nu.shape[0]):
        kernel[row] = phase_sum(nu[row], grid.nodes, samples)
    return kernel


def ground_jump_quadrature(
    hamiltonian: HamiltonianSpec,
    a: npt.ArrayLike,
    filt: FilterSpec,
    grid: QuadratureGrid | None = None,
    *,
    label: str = "",
) -> tuple[ComplexMatrix, JumpBuildReport]:
    """Time-quadrature ground-state jump with its mismatch against the eigenbasis form.

    The annihilation leak of the truncated integral is reported, never deflated.

    Raises:
        ResolutionError: Grid spacing aliases the Bohr frequencies.
    """
    eig = hamiltonian.spectrum
    check_filter_gap(check_nondegenerate_ground(eig), filt)
    grid = grid or build_quadrature(filt)
    check_resolution(grid, hamiltonian.e_max)

    with logfire.span("ground_jump_quadrature", dim=eig.dim, nodes=grid.nodes.shape[0], coupling=label):
        a_eig = eig.to_eigenbasis(as_matrix(a, square=True))
        k_quad = eig.from_eigenbasis(quadrature_kernel(eig, filt, grid) * a_eig)
        k_eig = filtered_jump(eig, a, filt)
        mismatch = operator_norm(k_quad - k_eig)
        residual = annihilation_residual(k_quad, eig.eigenvectors[:, 0])

    logger.debug(
        "Quadrature jump built",
        extra={"coupling": label, "mismatch": mismatch, "leak": residual, "nodes": grid.nodes.shape[0]},
    )
    report = JumpBuildReport(
        method=JumpMethod.QUADRATURE,
        annihilation_residual=residual,
        truncation=(grid.half_width, int(grid.nodes.shape[0])),
        mismatch_vs_eigenbasis=mismatch,
        label=label,
    )
    return k_quad, report
