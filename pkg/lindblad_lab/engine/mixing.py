"""Mixing time over a finite probe set.

The hitting time of a probe is the first time its trace distance to the
target drops to ``eta``. The maximum over probes is a lower bound of the
mixing time over all initial states.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import logfire
import numpy as np
import numpy.typing as npt

from lindblad_lab.core.exceptions import DomainError, ParameterError
from lindblad_lab.core.tolerances import BISECTION_RTOL, MAX_SUPEROPERATOR_DIM
from lindblad_lab.core.workers import run_ordered
from lindblad_lab.densemath import DensityMatrix, hermitian_part, trace_distance, unvectorize, vectorize
from lindblad_lab.engine.propagation import RK4_STEP_BOUND, propagate_vectors, rk4_step
from lindblad_lab.engine.stationary import stationary_state
from lindblad_lab.engine.superoperator import SuperOperator, assemble
from lindblad_lab.jumps.types import LindbladSpec

logger = logging.getLogger(__name__)

PROBE_SET_NOTE = "max over a finite probe set; a lower bound of the mixing time over all initial states"


@dataclass(frozen=True)
class MixingReport:
    """Hitting times of every probe and their maximum.

    Attributes:
        eta: Target trace distance.
        hitting_times: Probe label to hitting time (``inf`` if not reached by ``t_max``).
        tau_mix: Maximum hitting time.
        probe_set: Description of the probes.
        spectral_gap: Superoperator gap (``nan`` on the matrix-free path).
        method: ``expm`` or ``rk4``.
        note: How ``tau_mix`` relates to the universal definition.
    """

    eta: float
    hitting_times: dict[str, float]
    tau_mix: float
    probe_set: str
    spectral_gap: float
    method: str = "expm"
    note: str = PROBE_SET_NOTE
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def worst_probe(self) -> str:
        return max(self.hitting_times, key=lambda label: self.hitting_times[label])


def probe_states(
    dim: int,
    seeds: Sequence[int] = (),
    extra: Mapping[str, DensityMatrix] | None = None,
) -> list[tuple[str, DensityMatrix]]:
    """Computational basis states, one Haar-random pure state per seed, the maximally mixed state, extras."""
    probes = [(f"basis[{i}]", DensityMatrix.basis_state(dim, i)) for i in range(dim)]
    probes += [(f"haar[seed={s}]", DensityMatrix.haar_random(dim, s)) for s in seeds]
    probes.append(("maximally_mixed", DensityMatrix.maximally_mixed(dim)))
    probes += list((extra or {}).items())
    return probes


def _distance(vec: npt.NDArray[np.complex128], sigma: DensityMatrix) -> float:
    return trace_distance(hermitian_part(unvectorize(vec)), sigma)


def _bisect(
    superop: SuperOperator,
    start_vec: npt.NDArray[np.complex128],
    sigma: DensityMatrix,
    eta: float,
    t_lo: float,
    t_hi: float,
) -> float:
    """Shrink ``[t_lo, t_hi]`` around the crossing to ``BISECTION_RTOL`` relative; return the upper end."""
    lo, hi = 0.0, t_hi - t_lo
    while (hi - lo) > BISECTION_RTOL * (t_lo + hi):
        mid = 0.5 * (lo + hi)
        if _distance(propagate_vectors(superop, start_vec, mid), sigma) <= eta:
            hi = mid
        else:
            lo = mid
    return t_lo + hi


def _default_cell(gap: float) -> float:
    if not math.isfinite(gap) or gap <= 0:
        return 1.0
    return min(max(0.25 / gap, 1e-2), 10.0)


def mixing_time(
    spec: LindbladSpec,
    sigma: DensityMatrix,
    eta: float,
    probe_seeds: Sequence[int] = (0,),
    extra_probes: Mapping[str, DensityMatrix] | None = None,
    *,
    t_max: float | None = None,
    cell: float | None = None,
) -> MixingReport:
    """Probe-set mixing time.

    Probes are propagated together through exponential actions cell by cell;
    a probe that crosses ``eta`` inside a cell is bisected from the cell start.
    Beyond the superoperator guard the RK4 path is used instead.

    Raises:
        ParameterError: ``eta`` outside ``(0, 2]``.
        DomainError: The fixed point is not unique.
    """
    if not 0.0 < eta <= 2.0:
        raise ParameterError("eta must lie in (0, 2]", details={"eta": eta})
    probes = probe_states(spec.dim, probe_seeds, extra_probes)
    description = (
        f"{spec.dim} basis states, {len(probe_seeds)} Haar-random pure states, maximally mixed"
        + (f", extra: {', '.join(extra_probes)}" if extra_probes else "")
    )
    if spec.dim > MAX_SUPEROPERATOR_DIM:
        return _mixing_time_rk4(spec, sigma, eta, probes, description, t_max)

    superop = assemble(spec)
    stationary = stationary_state(superop)
    if not stationary.unique:
        raise DomainError("Mixing time needs a unique fixed point", details={"null_dim": stationary.null_dim})
    gap = stationary.gap
    cell = cell or _default_cell(gap)
    t_max = t_max or max(200.0 / gap if math.isfinite(gap) and gap > 0 else 200.0, 10.0 * cell)

    hitting: dict[str, float] = {}
    labels = [label for label, _ in probes]
    vectors = np.stack([vectorize(state.mat) for _, state in probes], axis=1)
    for index, label in enumerate(labels):
        if _distance(vectors[:, index], sigma) <= eta:
            hitting[label] = 0.0

    t = 0.0
    with logfire.span("mixing_time", dim=spec.dim, probes=len(probes), eta=eta):
        while len(hitting) < len(labels) and t < t_max:
            pending = [i for i, label in enumerate(labels) if label not in hitting]
            next_vectors = propagate_vectors(superop, vectors[:, pending], cell)
            for column, index in enumerate(pending):
                if _distance(next_vectors[:, column], sigma) <= eta:
                    hitting[labels[index]] = _bisect(superop, vectors[:, index], sigma, eta, t, t + cell)
            vectors[:, pending] = next_vectors
            t += cell

    for label in labels:
        if label not in hitting:
            logger.warning("Probe did not reach eta before t_max", extra={"probe": label, "t_max": t_max})
            hitting[label] = float("inf")
    ordered = {label: hitting[label] for label in labels}
    report = MixingReport(
        eta=eta,
        hitting_times=ordered,
        tau_mix=max(ordered.values()),
        probe_set=description,
        spectral_gap=gap,
    )
    logger.info("Mixing time computed", extra={"tau_mix": report.tau_mix, "gap": gap, "worst": report.worst_probe})
    return report


def _mixing_time_rk4(
    spec: LindbladSpec,
    sigma: DensityMatrix,
    eta: float,
    probes: list[tuple[str, DensityMatrix]],
    description: str,
    t_max: float | None,
) -> MixingReport:
    """Step-resolution hitting times from matrix-free RK4 (no uniqueness check is possible here)."""
    dt = RK4_STEP_BOUND / max(spec.rate_bound(), 1e-300)
    horizon = t_max or 200.0
    logger.warning("Mixing time via RK4 fallback", extra={"dim": spec.dim, "dt": dt, "t_max": horizon})

    def hitting_time(state: DensityMatrix) -> float:
        x = np.array(state.mat, dtype=np.complex128)
        t = 0.0
        while trace_distance(x, sigma) > eta:
            if t >= horizon:
                return float("inf")
            x = hermitian_part(rk4_step(spec, x, dt))
            t += dt
        return t

    with logfire.span("mixing_time_rk4", dim=spec.dim, probes=len(probes), eta=eta):
        times = run_ordered(hitting_time, [state for _, state in probes])
    ordered = {label: t for (label, _), t in zip(probes, times, strict=True)}
    return MixingReport(
        eta=eta,
        hitting_times=ordered,
        tau_mix=max(ordered.values()),
        probe_set=description,
        spectral_gap=float("nan"),
        method="rk4",
        extras={"dt": dt},
    )
