"""One-call Lindbladian assemblers, one jump per coupling operator."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import logfire
import numpy as np
import numpy.typing as npt

from lindblad_lab.core.workers import run_ordered
from lindblad_lab.densemath import ComplexMatrix, DensityMatrix, gibbs_state
from lindblad_lab.filters import (
    FilterSpec,
    build_quadrature,
    default_thermal_sigma,
    gibbs_gaussian_filter,
    ground_filter,
    projector_filter,
    thermal_single_jump_filter,
)
from lindblad_lab.jumps.excited import (
    default_projected_filter,
    default_squared_filter,
    excited_jump_projected,
    excited_jump_squared,
    projected_target_index,
    squared_target,
)
from lindblad_lab.jumps.gibbs import (
    CoherentSolution,
    TransitionRule,
    gibbs_jump_family,
    gibbs_jump_single,
    solve_coherent_term,
)
from lindblad_lab.jumps.ground import annihilation_residual, ground_jump_eigenbasis, ground_jump_quadrature
from lindblad_lab.jumps.singular import singular_lindbladian
from lindblad_lab.jumps.types import JumpBuildReport, JumpMethod, LindbladSpec, WeightedJump
from lindblad_lab.models import Coupling, HamiltonianSpec, default_couplings

logger = logging.getLogger(__name__)

__all__ = [
    "FamilyBuild",
    "amplitude_damping",
    "excited_projected_lindbladian",
    "excited_squared_lindbladian",
    "gibbs_family_lindbladian",
    "ground_state_lindbladian",
    "singular_lindbladian",
    "thermal_lindbladian",
]


@dataclass(frozen=True)
class FamilyBuild:
    """An assembled Lindbladian plus construction diagnostics.

    Attributes:
        spec: The Lindbladian.
        reports: One build report per coupling (ground-type families).
        target: Pure target state when the protocol has one.
        coherent_solution: Solved coherent term for thermal families.
        projector: ``P_mu(H)`` for the projected excited-state family.
    """

    spec: LindbladSpec
    reports: tuple[JumpBuildReport, ...] = ()
    target: DensityMatrix | None = None
    coherent_solution: CoherentSolution | None = None
    projector: ComplexMatrix | None = field(default=None, repr=False)

    @property
    def max_annihilation_residual(self) -> float:
        return max((r.annihilation_residual for r in self.reports), default=0.0)


def _couplings(hamiltonian: HamiltonianSpec, couplings: Sequence[Coupling] | None) -> list[Coupling]:
    return list(couplings) if couplings is not None else default_couplings(hamiltonian.dim)


def ground_state_lindbladian(
    hamiltonian: HamiltonianSpec,
    couplings: Sequence[Coupling] | None = None,
    filt: FilterSpec | None = None,
    method: JumpMethod = JumpMethod.EIGENBASIS,
    n_nodes: int | None = None,
) -> FamilyBuild:
    """Ground-state preparation with ``G = H``.

    The default filter uses ``delta = gap_hint`` and ``E_max = norm_hint``.
    Independent couplings are built on the worker pool.
    """
    couplings = _couplings(hamiltonian, couplings)
    filt = filt or ground_filter(hamiltonian.gap_hint or 0.0, hamiltonian.e_max)
    grid = build_quadrature(filt, n_nodes) if method is JumpMethod.QUADRATURE else None

    def build(coupling: Coupling) -> tuple[ComplexMatrix, JumpBuildReport]:
        if grid is not None:
            return ground_jump_quadrature(hamiltonian, coupling.operator, filt, grid, label=coupling.label)
        return ground_jump_eigenbasis(hamiltonian, coupling.operator, filt, label=coupling.label)

    with logfire.span("ground_state_lindbladian", dim=hamiltonian.dim, couplings=len(couplings), method=str(method)):
        built = run_ordered(build, couplings)

    jumps = tuple(WeightedJump(k, 1.0, c.label) for (k, _), c in zip(built, couplings, strict=True))
    reports = tuple(report for _, report in built)
    spec = LindbladSpec(coherent=hamiltonian.dense, jumps=jumps, label="ground")
    target = DensityMatrix.pure(hamiltonian.spectrum.eigenvectors[:, 0])
    logger.info(
        "Ground-state Lindbladian assembled",
        extra={"couplings": len(jumps), "method": str(method), "max_residual": max(r.annihilation_residual for r in reports)},
    )
    return FamilyBuild(spec=spec, reports=reports, target=target)


def thermal_lindbladian(
    hamiltonian: HamiltonianSpec,
    beta: float,
    couplings: Sequence[Coupling] | None = None,
    sigma: float | None = None,
    filt: FilterSpec | None = None,
) -> FamilyBuild:
    """Single thermal jump per coupling with the coherent term solved at ``sigma_beta``.

    ``sigma`` defaults to ``default_thermal_sigma(beta, E_max)``.
    """
    couplings = _couplings(hamiltonian, couplings)
    if filt is None:
        sigma = sigma if sigma is not None else default_thermal_sigma(beta, hamiltonian.e_max)
        filt = thermal_single_jump_filter(beta, sigma, hamiltonian.e_max)
    with logfire.span("thermal_lindbladian", dim=hamiltonian.dim, beta=beta, couplings=len(couplings)):
        jumps = tuple(
            WeightedJump(gibbs_jump_single(hamiltonian, c.operator, beta, filt), 1.0, c.label) for c in couplings
        )
        target = gibbs_state(hamiltonian.spectrum, beta)
        solution = solve_coherent_term(hamiltonian, jumps, target)
    spec = LindbladSpec(coherent=solution.coherent, jumps=jumps, label="gibbs_single")
    return FamilyBuild(spec=spec, target=target, coherent_solution=solution)


def gibbs_family_lindbladian(
    hamiltonian: HamiltonianSpec,
    beta: float,
    couplings: Sequence[Coupling] | None = None,
    sigma: float | None = None,
    rule: TransitionRule = TransitionRule.METROPOLIS,
    omega_grid: npt.ArrayLike | None = None,
    *,
    compensate_width: bool = True,
    solve_coherent: bool = True,
) -> FamilyBuild:
    """Frequency-resolved thermal jumps for every coupling, optionally with solved ``G``."""
    couplings = _couplings(hamiltonian, couplings)
    sigma = sigma if sigma is not None else default_thermal_sigma(beta, hamiltonian.e_max)
    filt = gibbs_gaussian_filter(beta, sigma, hamiltonian.e_max)

    def build(coupling: Coupling) -> LindbladSpec:
        return gibbs_jump_family(
            hamiltonian,
            coupling.operator,
            beta,
            filt,
            omega_grid,
            rule,
            compensate_width=compensate_width,
            label=coupling.label,
        )

    with logfire.span("gibbs_family_lindbladian", dim=hamiltonian.dim, beta=beta, couplings=len(couplings)):
        families = run_ordered(build, couplings)
        jumps = tuple(j for family in families for j in family.jumps)
        target = gibbs_state(hamiltonian.spectrum, beta)
        solution = solve_coherent_term(hamiltonian, jumps, target) if solve_coherent else None

    coherent = solution.coherent if solution is not None else np.zeros_like(hamiltonian.dense)
    spec = LindbladSpec(coherent=coherent, jumps=jumps, label="gibbs_family")
    return FamilyBuild(spec=spec, target=target, coherent_solution=solution)


def excited_squared_lindbladian(
    hamiltonian: HamiltonianSpec,
    mu: float,
    couplings: Sequence[Coupling] | None = None,
    filt: FilterSpec | None = None,
) -> FamilyBuild:
    """Prepares the eigenstate of ``H`` closest to ``mu``; ``G = H``."""
    couplings = _couplings(hamiltonian, couplings)
    filt = filt or default_squared_filter(hamiltonian, mu)
    target_vec = squared_target(hamiltonian, mu)
    jumps: list[WeightedJump] = []
    reports: list[JumpBuildReport] = []
    with logfire.span("excited_squared_lindbladian", dim=hamiltonian.dim, mu=mu):
        for c in couplings:
            k = excited_jump_squared(hamiltonian, mu, c.operator, filt)
            jumps.append(WeightedJump(k, 1.0, c.label))
            reports.append(
                JumpBuildReport(JumpMethod.EIGENBASIS, annihilation_residual(k, target_vec), label=c.label)
            )
    spec = LindbladSpec(coherent=hamiltonian.dense, jumps=tuple(jumps), label="excited_squared")
    return FamilyBuild(spec=spec, reports=tuple(reports), target=DensityMatrix.pure(target_vec))


def excited_projected_lindbladian(
    hamiltonian: HamiltonianSpec,
    mu: float,
    delta: float,
    couplings: Sequence[Coupling] | None = None,
    filt: FilterSpec | None = None,
) -> FamilyBuild:
    """Prepares the lowest eigenstate above ``mu + delta`` from ``P_mu``-projected states; ``G = H``.

    States supported below ``mu`` are also stationary, so the dynamics has to
    start inside the range of the returned projector.
    """
    couplings = _couplings(hamiltonian, couplings)
    filt = filt or default_projected_filter(hamiltonian, mu, delta)
    projector_spec = projector_filter(mu, delta, hamiltonian.e_max)
    eig = hamiltonian.spectrum
    target_vec = eig.eigenvectors[:, projected_target_index(eig.eigenvalues, mu, delta)]

    jumps: list[WeightedJump] = []
    reports: list[JumpBuildReport] = []
    projector: ComplexMatrix | None = None
    with logfire.span("excited_projected_lindbladian", dim=hamiltonian.dim, mu=mu, delta=delta):
        for c in couplings:
            k, projector = excited_jump_projected(hamiltonian, mu, delta, c.operator, filt, projector_spec)
            jumps.append(WeightedJump(k, 1.0, c.label))
            reports.append(
                JumpBuildReport(JumpMethod.EIGENBASIS, annihilation_residual(k, target_vec), label=c.label)
            )
    spec = LindbladSpec(coherent=hamiltonian.dense, jumps=tuple(jumps), label="excited_projected")
    return FamilyBuild(spec=spec, reports=tuple(reports), target=DensityMatrix.pure(target_vec), projector=projector)


def amplitude_damping(gamma: float = 1.0) -> LindbladSpec:
    """Qubit decay ``K = sqrt(gamma) |0><1|`` with ``G = 0``; fixed point ``|0><0|``."""
    lowering = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
    return LindbladSpec(
        coherent=np.zeros((2, 2), dtype=np.complex128),
        jumps=(WeightedJump(lowering, gamma, "sigma_minus"),),
        label="amplitude_damping",
    )
