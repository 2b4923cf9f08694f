"""State-preparation scenarios: ground, Gibbs, excited, singular-vector and non-normal eigenvector targets."""

import logging

import logfire
import numpy as np
import scipy.linalg

from lindblad_lab.densemath import DensityMatrix, fidelity, hermitian_part, operator_norm, trace_distance
from lindblad_lab.engine.kms import kms_residual
from lindblad_lab.engine.stationary import stationary_state
from lindblad_lab.engine.superoperator import assemble
from lindblad_lab.jumps.excited import projected_target_index
from lindblad_lab.jumps.singular import (
    complex_grid,
    gram_hamiltonian,
    nonnormal_eigvec_search,
    singular_lindbladian,
    smallest_singular_vector,
)
from lindblad_lab.models import LatticeGeometry, random_matrix
from lindblad_lab.scenarios import ScenarioOutcome, scenario
from lindblad_lab.scenarios._common import (
    build_family,
    build_hamiltonian,
    evolution_table,
    fixed_point_residual,
    mixing_metrics,
    probe_mixing,
    projection_window,
    resolve_couplings,
    run_trajectory,
    trajectory_metrics,
)
from lindblad_lab.schemas.config import RandomMatrixModelConfig, ScenarioConfig
from lindblad_lab.schemas.manifest import MetricValue
from lindblad_lab.services.artifacts import CsvTable, finite_or_none

logger = logging.getLogger(__name__)


def _matrix_model(config: ScenarioConfig) -> RandomMatrixModelConfig:
    assert isinstance(config.model, RandomMatrixModelConfig)
    return config.model


def _qubit_geometry(dim: int) -> LatticeGeometry | None:
    return LatticeGeometry(n_sites=dim.bit_length() - 1) if dim > 1 and dim & (dim - 1) == 0 else None


@scenario("prepare-ground", help="Ground state of a lattice model, started from its highest eigenstate")
def prepare_ground(config: ScenarioConfig) -> ScenarioOutcome:
    hamiltonian = build_hamiltonian(config.model)  # type: ignore[arg-type]
    build = build_family(config, hamiltonian)
    assert build.target is not None
    superop = assemble(build.spec)
    stationary = stationary_state(superop)
    residual = fixed_point_residual(build.spec, stationary.state, config.checks.fixed_point_tol)

    top = DensityMatrix.pure(hamiltonian.spectrum.eigenvectors[:, -1])
    trajectory = run_trajectory(build.spec, top, config.evolve, stationary.gap, superop)
    report, hitting = probe_mixing(build.spec, build.target, config.probes, {"top_eigenstate": top})

    metrics: dict[str, MetricValue] = {
        "model": hamiltonian.name,
        "fixed_point_residual": residual,
        "stationary_fidelity": fidelity(stationary.state, build.target),
        "spectral_gap": finite_or_none(stationary.gap),
        "max_annihilation_residual": build.max_annihilation_residual,
        "initial_overlap": fidelity(top, build.target),
        **trajectory_metrics(trajectory, build.target),
        **mixing_metrics(report),
    }
    mismatches = [r.mismatch_vs_eigenbasis for r in build.reports if r.mismatch_vs_eigenbasis is not None]
    if mismatches:
        metrics["max_quadrature_mismatch"] = max(mismatches)
    return ScenarioOutcome(
        metrics=metrics,
        tables=[evolution_table(trajectory, build.target, hamiltonian.dense), hitting],
        seeds={"probes": config.probes.seed},
    )


@scenario("prepare-gibbs", help="Gibbs state at inverse temperature beta, with KMS diagnostics")
def prepare_gibbs(config: ScenarioConfig) -> ScenarioOutcome:
    hamiltonian = build_hamiltonian(config.model)  # type: ignore[arg-type]
    build = build_family(config, hamiltonian)
    assert build.target is not None
    superop = assemble(build.spec)
    stationary = stationary_state(superop)
    residual = fixed_point_residual(build.spec, stationary.state, config.checks.fixed_point_tol)

    top = DensityMatrix.pure(hamiltonian.spectrum.eigenvectors[:, -1])
    trajectory = run_trajectory(build.spec, top, config.evolve, stationary.gap, superop)
    report, hitting = probe_mixing(build.spec, build.target, config.probes)
    solution = build.coherent_solution
    return ScenarioOutcome(
        metrics={
            "model": hamiltonian.name,
            "beta": config.jump.beta,
            "fixed_point_residual": residual,
            "stationary_distance_to_gibbs": trace_distance(stationary.state, build.target),
            "kms_residual": kms_residual(superop, build.target),
            "coherent_solve_residual": solution.residual if solution is not None else None,
            "spectral_gap": finite_or_none(stationary.gap),
            **trajectory_metrics(trajectory, build.target),
            **mixing_metrics(report),
        },
        tables=[evolution_table(trajectory, build.target, hamiltonian.dense), hitting],
        seeds={"probes": config.probes.seed},
    )


@scenario("prepare-excited", help="Excited eigenstate via projected or squared-Hamiltonian jumps")
def prepare_excited(config: ScenarioConfig) -> ScenarioOutcome:
    hamiltonian = build_hamiltonian(config.model)  # type: ignore[arg-type]
    build = build_family(config, hamiltonian)
    assert build.target is not None
    superop = assemble(build.spec)
    target_residual = fixed_point_residual(build.spec, build.target, config.checks.fixed_point_tol)
    stationary = stationary_state(superop)

    metrics: dict[str, MetricValue] = {
        "model": hamiltonian.name,
        "family": str(config.jump.family),
        "target_residual": target_residual,
        "max_annihilation_residual": build.max_annihilation_residual,
        "stationary_null_dim": stationary.null_dim,
    }
    if build.projector is not None:
        # states below mu are stationary too, so start inside the range of P_mu
        mu, delta = projection_window(hamiltonian, config.jump.mu, config.jump.delta)
        haar = DensityMatrix.haar_random(hamiltonian.dim, config.seed)
        projected = hermitian_part(build.projector @ haar.mat @ build.projector)
        start = DensityMatrix(projected / np.real(np.trace(projected)))
        metrics |= {
            "mu": mu,
            "delta": delta,
            "target_index": projected_target_index(hamiltonian.spectrum.eigenvalues, mu, delta),
        }
    else:
        start = DensityMatrix.maximally_mixed(hamiltonian.dim)
        metrics |= {
            "mu": config.jump.mu,
            "stationary_fidelity": fidelity(stationary.state, build.target) if stationary.unique else None,
        }
    trajectory = run_trajectory(build.spec, start, config.evolve, stationary.gap, superop)
    metrics |= trajectory_metrics(trajectory, build.target)
    return ScenarioOutcome(
        metrics=metrics,
        tables=[evolution_table(trajectory, build.target, hamiltonian.dense)],
        seeds={"initial_state": config.seed},
    )


@scenario("prepare-singular", help="Minimal right singular vector of a seeded random matrix")
def prepare_singular(config: ScenarioConfig) -> ScenarioOutcome:
    model = _matrix_model(config)
    t = random_matrix(model.dim, model.dim, model.seed)
    couplings = resolve_couplings(_qubit_geometry(model.dim), config.jump.couplings)
    spec = singular_lindbladian(t, couplings, seed=config.jump.coupling_seed)
    superop = assemble(spec)
    stationary = stationary_state(superop)
    residual = fixed_point_residual(spec, stationary.state, config.checks.fixed_point_tol)

    oracle = DensityMatrix.pure(smallest_singular_vector(t))
    trajectory = run_trajectory(spec, DensityMatrix.maximally_mixed(model.dim), config.evolve, stationary.gap, superop)
    gram = gram_hamiltonian(t)
    return ScenarioOutcome(
        metrics={
            "dim": model.dim,
            "sigma_min": float(np.sqrt(max(gram.spectrum.eigenvalues[0], 0.0))),
            "couplings": len(spec.jumps),
            "unique_fixed_point": stationary.unique,
            "fixed_point_residual": residual,
            "stationary_fidelity": fidelity(stationary.state, oracle),
            "spectral_gap": finite_or_none(stationary.gap),
            **trajectory_metrics(trajectory, oracle),
        },
        tables=[evolution_table(trajectory, oracle, gram.dense)],
        seeds={"matrix": model.seed, "couplings": config.jump.coupling_seed},
    )


@scenario("prepare-nonnormal", help="Eigenvector of a non-normal matrix by a singular-value grid search")
def prepare_nonnormal(config: ScenarioConfig) -> ScenarioOutcome:
    model = _matrix_model(config)
    jump = config.jump
    a = random_matrix(model.dim, model.dim, model.seed)
    if jump.lambda_center is not None:
        center = complex(*jump.lambda_center)
    else:
        eigenvalues = scipy.linalg.eigvals(a)
        center = complex(eigenvalues[int(np.argmin(np.abs(eigenvalues)))])
        logger.info("Grid centered on the eigenvalue of smallest modulus", extra={"center": str(center)})
    grid = complex_grid(center, jump.lambda_radius, jump.lambda_points)
    couplings = resolve_couplings(_qubit_geometry(model.dim), jump.couplings)

    with logfire.span("prepare_nonnormal", dim=model.dim, points=len(grid)):
        result = nonnormal_eigvec_search(a, grid, couplings, seed=jump.coupling_seed)

    table = CsvTable("nonnormal")
    for index, (lam, s) in enumerate(zip(grid, result.s_min, strict=True)):
        table.append(index, lam.real, lam.imag, float(s))
    norm = operator_norm(a)
    return ScenarioOutcome(
        metrics={
            "dim": model.dim,
            "grid_center_re": center.real,
            "grid_center_im": center.imag,
            "best_lambda_re": result.best_lambda.real,
            "best_lambda_im": result.best_lambda.imag,
            "s_min": float(result.s_min[result.best_index]),
            "residual": result.residual,
            "relative_residual": result.residual / norm,
            "ambiguous": result.ambiguous,
        },
        tables=[table],
        seeds={"matrix": model.seed, "couplings": jump.coupling_seed},
    )
