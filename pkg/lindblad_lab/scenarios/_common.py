"""Builders shared by the scenario modules: models, couplings, families, trajectories."""

import logging
import math

import numpy as np

from lindblad_lab.core.exceptions import InvariantViolationError, ParameterError
from lindblad_lab.densemath import ComplexMatrix, DensityMatrix, trace_norm
from lindblad_lab.engine.dilation import evolve_dilation
from lindblad_lab.engine.mixing import MixingReport, mixing_time
from lindblad_lab.engine.propagation import EvolutionMethod, EvolutionResult, evolve_expm, evolve_rk4
from lindblad_lab.engine.superoperator import SuperOperator, apply
from lindblad_lab.filters import FilterSpec, ground_filter
from lindblad_lab.jumps.families import (
    FamilyBuild,
    excited_projected_lindbladian,
    excited_squared_lindbladian,
    gibbs_family_lindbladian,
    ground_state_lindbladian,
    thermal_lindbladian,
)
from lindblad_lab.jumps.types import LindbladSpec
from lindblad_lab.models import (
    Coupling,
    HamiltonianSpec,
    LatticeGeometry,
    couplings_from_labels,
    pauli_terms_hamiltonian,
    random_local_hamiltonian,
    tfim_chain,
)
from lindblad_lab.schemas.config import (
    EvolveConfig,
    PauliTermsModelConfig,
    ProbeConfig,
    RandomLocalModelConfig,
    ScenarioConfig,
    TFIMModelConfig,
)
from lindblad_lab.schemas.manifest import MetricValue
from lindblad_lab.services.artifacts import CsvTable, finite_or_none

logger = logging.getLogger(__name__)

AUTO_HORIZON_GAPS = 30.0
AUTO_HORIZON_CAP = 1000.0
PROJECTED_DEFAULT_COUPLINGS = ("X*", "Z*")

LatticeModelConfig = TFIMModelConfig | PauliTermsModelConfig | RandomLocalModelConfig


# === Models and couplings ===


def build_hamiltonian(model: LatticeModelConfig) -> HamiltonianSpec:
    match model:
        case TFIMModelConfig():
            return tfim_chain(model.n, model.g, model.J)
        case PauliTermsModelConfig():
            return pauli_terms_hamiltonian(model.n, model.terms)
        case RandomLocalModelConfig():
            return random_local_hamiltonian(LatticeGeometry(n_sites=model.n), model.k, model.seed)
    raise ParameterError(f"Model {model.kind!r} is not a lattice Hamiltonian")


def resolve_couplings(
    geometry: LatticeGeometry | None,
    labels: list[str] | None,
    default: tuple[str, ...] | None = None,
) -> list[Coupling] | None:
    """Coupling operators from config labels; ``None`` lets the family pick its default set."""
    chosen = labels if labels is not None else (list(default) if default else None)
    if chosen is None:
        return None
    if geometry is None:
        raise ParameterError("Coupling labels need a qubit lattice", details={"labels": chosen})
    return couplings_from_labels(geometry, chosen)


def ground_filter_for(hamiltonian: HamiltonianSpec, config: ScenarioConfig) -> FilterSpec | None:
    overrides = config.filter
    if overrides.delta is None and overrides.e_max is None:
        return None
    return ground_filter(
        overrides.delta if overrides.delta is not None else hamiltonian.gap_hint or 0.0,
        overrides.e_max if overrides.e_max is not None else hamiltonian.e_max,
    )


def projection_window(hamiltonian: HamiltonianSpec, mu: float | None, delta: float | None) -> tuple[float, float]:
    """Defaults to a window between the two lowest levels, targeting the first excited state."""
    values = hamiltonian.spectrum.eigenvalues
    if values.shape[0] < 2:
        raise ParameterError("A projection window needs at least two levels")
    lower, upper = float(values[0]), float(values[1])
    mu = 0.5 * (lower + upper) if mu is None else mu
    delta = 0.45 * (upper - lower) if delta is None else delta
    return mu, delta


def build_family(config: ScenarioConfig, hamiltonian: HamiltonianSpec) -> FamilyBuild:
    """Dispatch on ``jump.family`` for the lattice families."""
    jump = config.jump
    geometry = hamiltonian.geometry
    match jump.family:
        case "ground":
            return ground_state_lindbladian(
                hamiltonian,
                resolve_couplings(geometry, jump.couplings),
                ground_filter_for(hamiltonian, config),
                jump.method,
                config.filter.n_nodes,
            )
        case "gibbs_single":
            return thermal_lindbladian(hamiltonian, jump.beta, resolve_couplings(geometry, jump.couplings), jump.sigma)
        case "gibbs_family":
            return gibbs_family_lindbladian(
                hamiltonian,
                jump.beta,
                resolve_couplings(geometry, jump.couplings),
                jump.sigma,
                jump.rule,
                compensate_width=jump.compensate_width,
            )
        case "excited_squared":
            if jump.mu is None:
                raise ParameterError("excited_squared needs jump.mu")
            return excited_squared_lindbladian(hamiltonian, jump.mu, resolve_couplings(geometry, jump.couplings))
        case "excited_projected":
            mu, delta = projection_window(hamiltonian, jump.mu, jump.delta)
            couplings = resolve_couplings(geometry, jump.couplings, PROJECTED_DEFAULT_COUPLINGS)
            return excited_projected_lindbladian(hamiltonian, mu, delta, couplings)
    raise ParameterError(f"Jump family {jump.family!r} is not built from a lattice model")


# === Checks ===


def fixed_point_residual(spec: LindbladSpec, state: DensityMatrix, tol: float) -> float:
    """``||L(state)||_1``.

    Raises:
        InvariantViolationError: Residual above ``tol``.
    """
    residual = trace_norm(apply(spec, state.mat))
    if residual > tol:
        raise InvariantViolationError(
            "Fixed-point residual above tolerance",
            details={"residual": residual, "tolerance": tol, "label": spec.label},
        )
    return residual


# === Trajectories ===


def auto_horizon(gap: float) -> float:
    """``30 / gap``, capped; a trajectory long enough for ``exp(-30)`` contraction."""
    if not math.isfinite(gap) or gap <= 0:
        return 1.0 if math.isinf(gap) else AUTO_HORIZON_CAP
    return min(AUTO_HORIZON_GAPS / gap, AUTO_HORIZON_CAP)


def run_trajectory(
    spec: LindbladSpec,
    rho0: DensityMatrix,
    evolve: EvolveConfig,
    gap: float,
    superop: SuperOperator | None = None,
) -> EvolutionResult:
    """Record about ``evolve.points`` states up to ``t_max`` with the configured method."""
    t_max = evolve.t_max if evolve.t_max is not None else auto_horizon(gap)
    intervals = evolve.points - 1
    match evolve.method:
        case EvolutionMethod.EXPM:
            return evolve_expm(spec, rho0, np.linspace(0.0, t_max, evolve.points), superop)
        case EvolutionMethod.RK4:
            steps = max(1, int(round(t_max / evolve.dt)))
            return evolve_rk4(spec, rho0, steps * evolve.dt, evolve.dt, max(1, steps // intervals))
        case EvolutionMethod.DILATION:
            steps = max(1, math.ceil(t_max / evolve.channel_dt - 1e-9))
            return evolve_dilation(
                spec, rho0, steps * evolve.channel_dt, evolve.channel_dt, max(1, steps // intervals)
            )
    raise ParameterError(f"Unknown evolution method {evolve.method!r}")


def evolution_table(result: EvolutionResult, target: DensityMatrix, observable: ComplexMatrix | None) -> CsvTable:
    table = CsvTable("evolution")
    for row in result.observables(target, observable):
        table.append(
            row["t"],
            row["trace_distance_to_target"],
            row["fidelity_to_target"],
            row["energy"],
            row["trace_drift"],
        )
    return table


def trajectory_metrics(result: EvolutionResult, target: DensityMatrix) -> dict[str, MetricValue]:
    final = result.observables(target)[-1]
    return {
        "evolution_method": str(result.method),
        "t_final": float(result.times[-1]),
        "final_fidelity": final["fidelity_to_target"],
        "final_distance": final["trace_distance_to_target"],
        "max_trace_drift": float(np.max(result.trace_drift)),
        "min_positivity_floor": float(np.min(result.positivity_floor)),
        "rk4_step_warning": result.step_warning,
    }


# === Mixing ===


def probe_mixing(
    spec: LindbladSpec,
    target: DensityMatrix,
    probes: ProbeConfig,
    extra: dict[str, DensityMatrix] | None = None,
) -> tuple[MixingReport, CsvTable]:
    report = mixing_time(spec, target, probes.eta, probes.seeds, extra)
    table = CsvTable("hitting")
    for label, t in report.hitting_times.items():
        table.append(label, t)
    return report, table


def mixing_metrics(report: MixingReport) -> dict[str, MetricValue]:
    return {
        "eta": report.eta,
        "tau_mix": finite_or_none(report.tau_mix),
        "worst_probe": report.worst_probe,
        "probe_set": report.probe_set,
        "mixing_note": report.note,
    }
