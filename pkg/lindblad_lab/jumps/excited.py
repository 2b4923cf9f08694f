"""Excited-state jumps: squared-Hamiltonian and spectrally projected constructions."""

import logging

import logfire
import numpy as np
import numpy.typing as npt

from lindblad_lab.core.exceptions import DomainError, ParameterError
from lindblad_lab.core.tolerances import DEGENERACY_TOL
from lindblad_lab.densemath import ComplexMatrix, EigenDecomposition
from lindblad_lab.filters import FilterSpec, ground_filter, projector_filter
from lindblad_lab.jumps.ground import check_filter_gap, check_nondegenerate_ground, filtered_jump
from lindblad_lab.models import HamiltonianSpec

logger = logging.getLogger(__name__)


def squared_spectrum(hamiltonian: HamiltonianSpec, mu: float) -> EigenDecomposition:
    """Eigendecomposition of ``(H - mu)^2`` reordered ascending.

    Raises:
        DomainError: Two eigenvalues are equally close to ``mu``.
    """
    eig = hamiltonian.spectrum
    shifted = (eig.eigenvalues - mu) ** 2
    order = np.argsort(shifted, kind="stable")
    squared = EigenDecomposition(eigenvalues=shifted[order], eigenvectors=eig.eigenvectors[:, order])
    check_nondegenerate_ground(squared, what="minimizer of |lambda - mu|")
    return squared


def default_squared_filter(hamiltonian: HamiltonianSpec, mu: float) -> FilterSpec:
    """Ground filter for ``(H - mu)^2``: width ``0.9 gap``, bound ``(E_max + |mu|)^2``."""
    squared = squared_spectrum(hamiltonian, mu)
    gap = float(squared.eigenvalues[1] - squared.eigenvalues[0])
    return ground_filter(0.9 * gap, (hamiltonian.e_max + abs(mu)) ** 2)


def excited_jump_squared(
    hamiltonian: HamiltonianSpec,
    mu: float,
    a: npt.ArrayLike,
    filt: FilterSpec | None = None,
) -> ComplexMatrix:
    """Ground-state jump of ``(H - mu)^2``; annihilates the eigenstate closest to ``mu``."""
    squared = squared_spectrum(hamiltonian, mu)
    filt = filt or default_squared_filter(hamiltonian, mu)
    check_filter_gap(float(squared.eigenvalues[1] - squared.eigenvalues[0]), filt)
    with logfire.span("excited_jump_squared", dim=squared.dim, mu=mu):
        return filtered_jump(squared, a, filt)


def squared_target(hamiltonian: HamiltonianSpec, mu: float) -> npt.NDArray[np.complex128]:
    return squared_spectrum(hamiltonian, mu).eigenvectors[:, 0]


# === Spectral projection ===


def check_projection_window(eigenvalues: npt.ArrayLike, mu: float, delta: float) -> None:
    """Raise ParameterError if an eigenvalue falls strictly inside ``(mu, mu + delta)``."""
    values = np.asarray(eigenvalues, dtype=np.float64)
    tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(values))))
    inside = values[(values > mu + tol) & (values < mu + delta - tol)]
    if inside.size:
        raise ParameterError(
            "Eigenvalue inside the projection window",
            details={"mu": mu, "delta": delta, "eigenvalues": inside.tolist()},
        )


def projected_target_index(eigenvalues: npt.ArrayLike, mu: float, delta: float) -> int:
    """Index of the lowest eigenvalue at or above ``mu + delta``."""
    values = np.asarray(eigenvalues, dtype=np.float64)
    tol = DEGENERACY_TOL * max(1.0, float(np.max(np.abs(values))))
    above = np.nonzero(values >= mu + delta - tol)[0]
    if above.size == 0:
        raise ParameterError("No eigenvalue above the projection threshold", details={"mu": mu, "delta": delta})
    index = int(above[0])
    if index + 1 < values.shape[0] and values[index + 1] - values[index] <= tol:
        raise DomainError("Degenerate target above the projection threshold", details={"index": index})
    return index


def default_projected_filter(hamiltonian: HamiltonianSpec, mu: float, delta: float) -> FilterSpec:
    """Ground filter whose width is 0.9 times the gap above the projected target."""
    values = hamiltonian.spectrum.eigenvalues
    target = projected_target_index(values, mu, delta)
    gap = float(values[target + 1] - values[target]) if target + 1 < values.shape[0] else hamiltonian.gap_hint or 1.0
    return ground_filter(min(0.9 * gap, 2.0 * hamiltonian.e_max), hamiltonian.e_max)


def spectral_projector(hamiltonian: HamiltonianSpec, projector: FilterSpec) -> ComplexMatrix:
    """``P_mu(H)``: the projector profile applied to the eigenvalues of ``H``."""
    eig = hamiltonian.spectrum
    return eig.apply_function(np.real(projector.freq(eig.eigenvalues)))


def excited_jump_projected(
    hamiltonian: HamiltonianSpec,
    mu: float,
    delta: float,
    a: npt.ArrayLike,
    filt: FilterSpec | None = None,
    projector: FilterSpec | None = None,
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """``K = P_mu(H) K_ground`` and ``P_mu(H)``.

    Only rows with ``lambda_i >= mu + delta`` survive, so the lowest
    eigenstate above the threshold is annihilated.

    Raises:
        ParameterError: An eigenvalue lies in ``(mu, mu + delta)``.
    """
    eig = hamiltonian.spectrum
    check_projection_window(eig.eigenvalues, mu, delta)
    filt = filt or default_projected_filter(hamiltonian, mu, delta)
    projector = projector or projector_filter(mu, delta, hamiltonian.e_max)
    with logfire.span("excited_jump_projected", dim=eig.dim, mu=mu, delta=delta):
        p = spectral_projector(hamiltonian, projector)
        k = p @ filtered_jump(eig, a, filt)
    logger.debug("Projected jump built", extra={"mu": mu, "delta": delta, "rank": int(round(np.real(np.trace(p))))})
    return k, p
