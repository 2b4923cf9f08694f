"""Analysis scenarios: mixing-time scaling, quasi-locality of jumps, dilation error order."""

import logging
import math

import numpy as np
import scipy.stats

from lindblad_lab.core.exceptions import ParameterError
from lindblad_lab.core.tolerances import MAX_SUPEROPERATOR_DIM
from lindblad_lab.core.workers import run_ordered
from lindblad_lab.densemath import DensityMatrix
from lindblad_lab.engine.error_order import channel_error_order, fit_power_law
from lindblad_lab.engine.mixing import mixing_time
from lindblad_lab.filters import FilterSpec, ground_filter
from lindblad_lab.jumps.families import amplitude_damping, ground_state_lindbladian
from lindblad_lab.models import HamiltonianSpec, PauliString
from lindblad_lab.quasilocality import decay_fit, jump_shells
from lindblad_lab.scenarios import ScenarioOutcome, scenario
from lindblad_lab.scenarios._common import build_family, build_hamiltonian, resolve_couplings
from lindblad_lab.schemas.config import ScenarioConfig
from lindblad_lab.schemas.manifest import MetricValue
from lindblad_lab.services.artifacts import CsvTable, finite_or_none

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95
MIXING_DEFAULT_COUPLINGS = ("X0",)


def _scan_filter(config: ScenarioConfig, hamiltonians: list[HamiltonianSpec]) -> FilterSpec:
    """One ground filter valid for every size in the scan."""
    overrides = config.filter
    delta = overrides.delta if overrides.delta is not None else min(h.gap_hint or 0.0 for h in hamiltonians)
    e_max = overrides.e_max if overrides.e_max is not None else max(h.e_max for h in hamiltonians)
    return ground_filter(delta, e_max)


def slope_interval(x: np.ndarray, y: np.ndarray, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Student-t interval for the slope of a least-squares line (needs three points)."""
    m = x.shape[0]
    slope, intercept = np.polyfit(x, y, 1)
    spread = float(np.sum((x - x.mean()) ** 2))
    dof = m - 2
    sigma2 = float(np.sum((y - (slope * x + intercept)) ** 2)) / dof
    half = float(scipy.stats.t.ppf(0.5 + confidence / 2, dof)) * math.sqrt(sigma2 / spread)
    return float(slope) - half, float(slope) + half


@scenario("mixing-scan", help="Probe-set mixing time of the ground-state dynamics across chain lengths")
def mixing_scan(config: ScenarioConfig) -> ScenarioOutcome:
    """Mixing time against chain length.

    Every size shares one ground filter (the smallest gap hint and the largest
    norm bound over the scan, unless overridden) and, by default, a single X
    coupling on the boundary site. Couplings on every site damp each mode at a
    size-independent rate.
    """
    probes = config.probes
    sizes = []
    for n in config.n_list:
        if 2**n > MAX_SUPEROPERATOR_DIM:
            logger.warning("Chain too long for the superoperator, skipped", extra={"n": n})
            continue
        sizes.append(n)
    model = config.model
    hamiltonians = {n: build_hamiltonian(model.model_copy(update={"n": n})) for n in sizes}  # type: ignore[union-attr]
    filt = _scan_filter(config, list(hamiltonians.values())) if hamiltonians else None

    def cell(n: int) -> tuple[int, float, float]:
        hamiltonian = hamiltonians[n]
        couplings = resolve_couplings(hamiltonian.geometry, config.jump.couplings, MIXING_DEFAULT_COUPLINGS)
        build = ground_state_lindbladian(hamiltonian, couplings, filt, config.jump.method, config.filter.n_nodes)
        assert build.target is not None
        top = DensityMatrix.pure(hamiltonian.spectrum.eigenvectors[:, -1])
        report = mixing_time(build.spec, build.target, probes.eta, probes.seeds, {"top_eigenstate": top})
        return n, report.tau_mix, report.spectral_gap

    results = run_ordered(cell, sizes)
    table = CsvTable("mixing")
    for n, tau, gap in results:
        table.append(n, tau, gap)

    taus = np.array([tau for _, tau, _ in results], dtype=np.float64)
    metrics: dict[str, MetricValue] = {
        "sizes": len(results),
        "eta": probes.eta,
        "couplings": ",".join(config.jump.couplings or MIXING_DEFAULT_COUPLINGS),
        "filter_delta": filt.params.delta if filt is not None else None,
        "filter_e_max": filt.params.e_max if filt is not None else None,
        "tau_mix_max": finite_or_none(float(np.max(taus))) if taus.size else None,
        "monotone": bool(np.all(np.diff(taus) >= 0)) if taus.size else None,
        "fit_exponent": None,
        "fit_exponent_ci_low": None,
        "fit_exponent_ci_high": None,
        "fit_r_squared": None,
    }
    usable = [(n, tau) for n, tau, _ in results if math.isfinite(tau) and tau > 0]
    if len(usable) < 2:
        logger.warning("Power-law fit suppressed", extra={"usable_points": len(usable)})
    else:
        ns = np.array([n for n, _ in usable], dtype=np.float64)
        ts = np.array([tau for _, tau in usable], dtype=np.float64)
        fit = fit_power_law(ns, ts)
        metrics |= {"fit_exponent": fit.slope, "fit_r_squared": fit.r_squared}
        if len(usable) >= 3:
            low, high = slope_interval(np.log(ns), np.log(ts))
            metrics |= {"fit_exponent_ci_low": low, "fit_exponent_ci_high": high}
    return ScenarioOutcome(metrics=metrics, tables=[table], seeds={"probes": probes.seed})


@scenario("quasilocality", help="Shell decomposition and exponential decay fit of a ground-state jump")
def quasilocality(config: ScenarioConfig) -> ScenarioOutcome:
    hamiltonian = build_hamiltonian(config.model)  # type: ignore[arg-type]
    geometry = hamiltonian.geometry
    assert geometry is not None
    if config.jump.couplings is None:
        site, letter = geometry.middle_site, "X"
    else:
        string = PauliString.from_label(config.jump.couplings[0])
        if len(string.support) != 1:
            raise ParameterError("Quasi-locality needs a single-site coupling", details={"label": string.label})
        ((site, letter),) = string.letters
    delta = config.filter.delta if config.filter.delta is not None else hamiltonian.gap_hint or 0.0
    e_max = config.filter.e_max if config.filter.e_max is not None else hamiltonian.e_max
    shells = jump_shells(hamiltonian, site, letter, ground_filter(delta, e_max))
    fit = decay_fit(shells)

    table = CsvTable("shells")
    for r, norm in zip(shells.radii, shells.norms, strict=True):
        table.append(r, float(norm), fit.predict(r))
    beyond = shells.norms[1:]
    return ScenarioOutcome(
        metrics={
            "model": hamiltonian.name,
            "site": site,
            "coupling": f"{letter}{site}",
            "filter_delta": delta,
            "mu_decay": fit.mu_decay,
            "decay_constant": fit.constant,
            "fit_residual": fit.residual,
            "nonzero_shells": shells.nonzero_count(),
            "reconstruction_error": shells.reconstruction_error,
            "monotone_beyond_r1": bool(np.all(np.diff(beyond) <= 1e-12)),
        },
        tables=[table],
    )


@scenario("error-order", help="Single-step and accumulated error order of the dilation channel")
def error_order(config: ScenarioConfig) -> ScenarioOutcome:
    if config.jump.family == "amplitude_damping":
        spec = amplitude_damping(config.jump.gamma)
        rho0 = DensityMatrix.basis_state(2, 1)
        model_name = "amplitude_damping"
    else:
        hamiltonian = build_hamiltonian(config.model)  # type: ignore[arg-type]
        spec = build_family(config, hamiltonian).spec
        rho0 = DensityMatrix.pure(hamiltonian.spectrum.eigenvectors[:, -1])
        model_name = hamiltonian.name

    report = channel_error_order(spec, rho0, config.dt_list, config.t_total)
    table = CsvTable("order")
    for dt, single, accumulated in zip(
        report.dts, report.single_step_errors, report.accumulated_errors, strict=True
    ):
        table.append(float(dt), float(single), float(accumulated))
    if not 1.8 <= report.single_step.slope <= 2.2:
        logger.warning("Single-step slope away from 2", extra={"slope": report.single_step.slope})
    return ScenarioOutcome(
        metrics={
            "model": model_name,
            "t_total": report.t_total,
            "single_step_slope": report.single_step.slope,
            "single_step_constant": report.single_step.constant,
            "single_step_r_squared": report.single_step.r_squared,
            "accumulated_slope": report.accumulated.slope,
            "accumulated_constant": report.accumulated.constant,
            "accumulated_r_squared": report.accumulated.r_squared,
        },
        tables=[table],
    )
