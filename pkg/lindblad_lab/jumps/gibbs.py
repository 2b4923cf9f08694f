"""Thermal (Gibbs) jump operators and the coherent term that fixes ``sigma_beta``."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import logfire
import numpy as np
import numpy.typing as npt

from lindblad_lab.core.exceptions import DomainError, ParameterError
from lindblad_lab.core.tolerances import DEGENERACY_TOL
from lindblad_lab.densemath import (
    ComplexMatrix,
    DensityMatrix,
    EigenDecomposition,
    RealVector,
    as_matrix,
    dagger,
    hermitian_part,
)
from lindblad_lab.filters import FilterKind, FilterSpec
from lindblad_lab.jumps.ground import bohr_frequencies, filtered_jump
from lindblad_lab.jumps.types import LindbladSpec, WeightedJump
from lindblad_lab.models import HamiltonianSpec

logger = logging.getLogger(__name__)

# largest off-diagonal weight of sigma in the H eigenbasis still treated as diagonal
_COMMUTING_TOL = 1e-10


class TransitionRule(StrEnum):
    METROPOLIS = "metropolis"
    GLAUBER = "glauber"


def transition_weight(rule: TransitionRule, omega: npt.ArrayLike, beta: float) -> npt.NDArray[np.float64]:
    """``gamma(omega)`` in [0, 1] with ``gamma(w) / gamma(-w) = exp(-beta w)``."""
    w = np.asarray(omega, dtype=np.float64)
    if rule is TransitionRule.METROPOLIS:
        return np.exp(np.minimum(0.0, -beta * w))
    return 0.5 * (1.0 - np.tanh(0.5 * beta * w))


def width_shift(beta: float, sigma: float) -> float:
    """``beta sigma^2 / 4``, the offset between the Gaussian filter and the rule."""
    return beta * sigma**2 / 4.0


def default_omega_grid(e_max: float, beta: float, sigma: float) -> npt.NDArray[np.float64]:
    """Grid of spacing ``sigma / 4`` symmetric about ``-beta sigma^2 / 4``.

    Together with width-compensated weights this symmetry makes the Gibbs
    state an exact fixed point once the coherent term is solved.
    """
    center = -width_shift(beta, sigma)
    reach = 2.0 * e_max + abs(center) + 6.0 * sigma
    half = math.ceil(reach / (sigma / 4.0))
    return center + (sigma / 4.0) * np.arange(-half, half + 1, dtype=np.float64)


def _quadrature_widths(grid: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if grid.shape[0] < 2:
        raise ParameterError("Frequency grid needs at least two points")
    return np.abs(np.gradient(grid))


def gibbs_jump_family(
    hamiltonian: HamiltonianSpec,
    a: npt.ArrayLike,
    beta: float,
    filt: FilterSpec,
    omega_grid: npt.ArrayLike | None = None,
    rule: TransitionRule = TransitionRule.METROPOLIS,
    *,
    compensate_width: bool = True,
    label: str = "A",
) -> LindbladSpec:
    """Frequency-resolved jumps ``K(w_l)`` with weights ``gamma * dw``; ``G = 0``.

    ``<psi_i|K(w)|psi_j> = f_hat(nu_ij - w) A_ij``. With ``compensate_width``
    the rule is evaluated at ``w + beta sigma^2 / 4``.

    Raises:
        ParameterError: Wrong filter kind, negative beta, or a grid that does
            not span ``[-2 E_max, 2 E_max]``.
    """
    if filt.kind is not FilterKind.GIBBS_GAUSSIAN or filt.params.sigma is None:
        raise ParameterError("gibbs_jump_family needs a gibbs_gaussian filter", details={"kind": str(filt.kind)})
    if beta < 0:
        raise ParameterError("beta must be nonnegative", details={"beta": beta})
    sigma = filt.params.sigma
    e_max = hamiltonian.e_max
    grid = (
        default_omega_grid(e_max, beta, sigma)
        if omega_grid is None
        else np.sort(np.asarray(omega_grid, dtype=np.float64).reshape(-1))
    )
    if grid.size == 0 or grid[0] > -2.0 * e_max or grid[-1] < 2.0 * e_max:
        raise ParameterError(
            "Frequency grid does not cover the Bohr frequency range",
            details={"grid_min": float(grid[0]) if grid.size else None, "e_max": e_max},
        )
    shift = width_shift(beta, sigma) if compensate_width else 0.0
    weights = transition_weight(rule, grid + shift, beta) * _quadrature_widths(grid)

    eig = hamiltonian.spectrum
    a_eig = eig.to_eigenbasis(as_matrix(a, square=True))
    nu = bohr_frequencies(eig.eigenvalues)
    jumps: list[WeightedJump] = []
    with logfire.span("gibbs_jump_family", dim=eig.dim, points=grid.shape[0], rule=str(rule)):
        for omega, weight in zip(grid, weights, strict=True):
            k = eig.from_eigenbasis(filt.freq(nu - omega) * a_eig)
            jumps.append(WeightedJump(k, float(weight), f"{label}@{omega:.6g}"))

    logger.debug("Gibbs family built", extra={"coupling": label, "points": grid.shape[0], "beta": beta})
    zero = np.zeros((eig.dim, eig.dim), dtype=np.complex128)
    return LindbladSpec(coherent=zero, jumps=tuple(jumps), label="gibbs_family")


def gibbs_jump_single(
    hamiltonian: HamiltonianSpec,
    a: npt.ArrayLike,
    beta: float,
    filt: FilterSpec,
) -> ComplexMatrix:
    """Single thermal jump ``K_ij = f_hat(lambda_i - lambda_j) A_ij``."""
    if filt.kind is not FilterKind.THERMAL_SINGLE_JUMP:
        raise ParameterError("gibbs_jump_single needs a thermal_single_jump filter", details={"kind": str(filt.kind)})
    if filt.params.beta is not None and not math.isclose(filt.params.beta, beta, rel_tol=1e-12, abs_tol=1e-15):
        raise ParameterError("Filter beta differs from the requested beta", details={"beta": beta, "filter_beta": filt.params.beta})
    return filtered_jump(hamiltonian.spectrum, a, filt)


# === Coherent term ===


@dataclass(frozen=True)
class CoherentSolution:
    """Solved coherent term.

    Attributes:
        coherent: Hermitian ``G`` in the computational basis.
        residual: ``max_i |D_ii| + max_{equal pairs} |D_ij|``, the part of
            ``D(sigma)`` no commutator can cancel.
        equal_pairs: Number of off-diagonal pairs with equal populations.
    """

    coherent: ComplexMatrix
    residual: float
    equal_pairs: int = 0


def _populations_in(eig: EigenDecomposition, sigma: DensityMatrix) -> RealVector:
    if sigma.populations is not None and sigma.basis is not None and np.array_equal(sigma.basis, eig.eigenvectors):
        return np.asarray(sigma.populations, dtype=np.float64)
    in_basis = eig.to_eigenbasis(sigma.mat)
    off = in_basis - np.diag(np.diag(in_basis))
    leak = float(np.max(np.abs(off))) if off.size else 0.0
    if leak > _COMMUTING_TOL:
        raise DomainError("Target state is not diagonal in the eigenbasis of H", details={"off_diagonal": leak})
    return np.real(np.diag(in_basis)).astype(np.float64)


def dissipator_in_eigenbasis(
    eig: EigenDecomposition,
    jumps: Sequence[WeightedJump],
    populations: RealVector,
) -> ComplexMatrix:
    """``D(sigma)`` for ``sigma = diag(populations)`` with everything in the eigenbasis."""
    dim = eig.dim
    total = np.zeros((dim, dim), dtype=np.complex128)
    for jump in jumps:
        k = eig.to_eigenbasis(jump.operator)
        kk = dagger(k) @ k
        term = (k * populations) @ dagger(k) - 0.5 * (kk * populations + populations[:, None] * kk)
        total += jump.weight * term
    return hermitian_part(total)


def solve_coherent_term(
    hamiltonian: HamiltonianSpec,
    jumps: LindbladSpec | Sequence[WeightedJump],
    sigma: DensityMatrix,
) -> CoherentSolution:
    """Solve ``-i[G, sigma] + D(sigma) = 0`` for Hermitian ``G``.

    In the eigenbasis ``G_ij = -i D_ij / (p_j - p_i)``; pairs with equal
    populations and the diagonal get ``G = 0`` and feed the residual, which
    is reported rather than raised.

    Raises:
        DomainError: ``sigma`` is rank deficient or not a function of ``H``.
    """
    eig = hamiltonian.spectrum
    jump_list = jumps.jumps if isinstance(jumps, LindbladSpec) else tuple(jumps)
    p = _populations_in(eig, sigma)
    if np.min(p) <= 0.0:
        raise DomainError("Target state must be full rank", details={"min_population": float(np.min(p))})

    with logfire.span("solve_coherent_term", dim=eig.dim, jumps=len(jump_list)):
        d = dissipator_in_eigenbasis(eig, jump_list, p)
        diff = p[None, :] - p[:, None]
        equal = np.abs(diff) <= DEGENERACY_TOL * np.maximum(p[None, :], p[:, None])
        np.fill_diagonal(equal, False)
        safe = np.where(equal | np.eye(eig.dim, dtype=bool), 1.0, diff)
        g = np.where(equal, 0.0, -1j * d / safe)
        np.fill_diagonal(g, 0.0)

        residual = float(np.max(np.abs(np.diag(d))))
        if np.any(equal):
            residual += float(np.max(np.abs(d[equal])))

    if residual > 1e-9:
        logger.warning("Coherent term residual is not small", extra={"residual": residual})
    return CoherentSolution(
        coherent=hermitian_part(eig.from_eigenbasis(g)),
        residual=residual,
        equal_pairs=int(np.count_nonzero(equal)) // 2,
    )
