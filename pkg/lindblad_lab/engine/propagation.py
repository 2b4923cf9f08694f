"""Time evolution by exact exponentials and by classical RK4."""

import logging
from dataclasses import dataclass, field
from enum import StrEnum

import logfire
import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from lindblad_lab.core.exceptions import ParameterError
from lindblad_lab.densemath import (
    ComplexMatrix,
    DensityMatrix,
    as_density,
    fidelity,
    hermitian_part,
    trace_distance,
    unvectorize,
    vectorize,
)
from lindblad_lab.engine.superoperator import SuperOperator, apply, assemble
from lindblad_lab.jumps.types import LindbladSpec

logger = logging.getLogger(__name__)

# stability scale for RK4: dt * (||G|| + sum w ||K||^2) should stay below this
RK4_STEP_BOUND = 0.1


class EvolutionMethod(StrEnum):
    EXPM = "expm"
    RK4 = "rk4"
    DILATION = "dilation"


@dataclass(frozen=True)
class EvolutionResult:
    """Recorded trajectory.

    Attributes:
        times: Recording times.
        states: Re-Hermitized, renormalized states at ``times``.
        method: Propagation method.
        trace_drift: ``|Tr rho - 1|`` before renormalization, per record.
        positivity_floor: Smallest eigenvalue before renormalization, per record.
        step_warning: RK4 step exceeded the stability bound.
    """

    times: npt.NDArray[np.float64]
    states: list[DensityMatrix]
    method: EvolutionMethod
    trace_drift: npt.NDArray[np.float64]
    positivity_floor: npt.NDArray[np.float64]
    step_warning: bool = False
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]

    def observables(self, target: DensityMatrix, observable: ComplexMatrix | None = None) -> list[dict[str, float]]:
        """Rows ``t, trace_distance_to_target, fidelity_to_target, energy, trace_drift``."""
        rows = []
        for t, state, drift in zip(self.times, self.states, self.trace_drift, strict=True):
            rows.append(
                {
                    "t": float(t),
                    "trace_distance_to_target": trace_distance(state, target),
                    "fidelity_to_target": fidelity(state, target),
                    "energy": state.expectation(observable) if observable is not None else float("nan"),
                    "trace_drift": float(drift),
                }
            )
        return rows


class StateRecorder:
    """Collects re-Hermitized states with their trace and positivity diagnostics."""

    def __init__(self) -> None:
        self.times: list[float] = []
        self.states: list[DensityMatrix] = []
        self.drift: list[float] = []
        self.floor: list[float] = []

    def record(self, t: float, mat: ComplexMatrix) -> DensityMatrix:
        herm = hermitian_part(mat)
        self.drift.append(abs(float(np.real(np.trace(herm))) - 1.0))
        self.floor.append(float(np.min(scipy.linalg.eigvalsh(herm))))
        state = DensityMatrix.from_propagated(herm)
        self.times.append(t)
        self.states.append(state)
        return state

    def result(self, method: EvolutionMethod, **kwargs: bool) -> EvolutionResult:
        return EvolutionResult(
            times=np.asarray(self.times, dtype=np.float64),
            states=self.states,
            method=method,
            trace_drift=np.asarray(self.drift, dtype=np.float64),
            positivity_floor=np.asarray(self.floor, dtype=np.float64),
            **kwargs,
        )


def _time_grid(t_grid: npt.ArrayLike) -> npt.NDArray[np.float64]:
    times = np.asarray(t_grid, dtype=np.float64).reshape(-1)
    if times.size == 0 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ParameterError("Time grid must be nonempty, nonnegative and sorted")
    return times


def evolve_expm(
    spec: LindbladSpec,
    rho0: DensityMatrix,
    t_grid: npt.ArrayLike,
    superop: SuperOperator | None = None,
) -> EvolutionResult:
    """``exp(L t) rho0`` at every time in ``t_grid`` (sequential exponential actions)."""
    times = _time_grid(t_grid)
    superop = superop or assemble(spec)
    recorder = StateRecorder()
    vec = vectorize(rho0.mat)
    previous = 0.0
    with logfire.span("evolve_expm", dim=spec.dim, points=times.shape[0]):
        for t in times:
            step = float(t) - previous
            if step > 0.0:
                vec = expm_multiply(superop.mat * step, vec)
            previous = float(t)
            recorder.record(previous, unvectorize(vec))
    return recorder.result(EvolutionMethod.EXPM)


def propagate_vectors(superop: SuperOperator, vectors: npt.ArrayLike, t: float) -> npt.NDArray[np.complex128]:
    """``exp(L t)`` applied to a batch of vectorized states (columns)."""
    batch = np.asarray(vectors, dtype=np.complex128)
    if t == 0.0:
        return batch.copy()
    return np.asarray(expm_multiply(superop.mat * t, batch), dtype=np.complex128)


def rk4_step(spec: LindbladSpec, x: ComplexMatrix, dt: float) -> ComplexMatrix:
    k1 = apply(spec, x)
    k2 = apply(spec, x + 0.5 * dt * k1)
    k3 = apply(spec, x + 0.5 * dt * k2)
    k4 = apply(spec, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve_rk4(
    spec: LindbladSpec,
    rho0: DensityMatrix,
    t_max: float,
    dt: float,
    record_every: int = 1,
) -> EvolutionResult:
    """Matrix-free classical RK4 on ``apply``; usable beyond the superoperator guard.

    ``round(t_max / dt)`` steps are taken. A step above ``0.1 / rate_bound``
    is flagged on the result and logged, not refused.
    """
    if dt <= 0 or t_max < 0:
        raise ParameterError("RK4 needs dt > 0 and t_max >= 0", details={"dt": dt, "t_max": t_max})
    if record_every < 1:
        raise ParameterError("record_every must be positive", details={"record_every": record_every})
    bound = RK4_STEP_BOUND / max(spec.rate_bound(), 1e-300)
    step_warning = dt > bound
    if step_warning:
        logger.warning("RK4 step exceeds the stability estimate", extra={"dt": dt, "bound": bound})

    n_steps = int(round(t_max / dt))
    recorder = StateRecorder()
    x = np.array(as_density(rho0), dtype=np.complex128)
    recorder.record(0.0, x)
    with logfire.span("evolve_rk4", dim=spec.dim, steps=n_steps, dt=dt):
        for step in range(1, n_steps + 1):
            x = hermitian_part(rk4_step(spec, x, dt))
            if step % record_every == 0 or step == n_steps:
                recorder.record(step * dt, x)
    return recorder.result(EvolutionMethod.RK4, step_warning=step_warning)


def exact_state(spec: LindbladSpec, rho0: DensityMatrix, t: float, superop: SuperOperator | None = None) -> ComplexMatrix:
    """Unnormalized ``exp(L t) rho0`` as a matrix, for error measurements."""
    superop = superop or assemble(spec)
    if t == 0.0:
        return np.array(rho0.mat, dtype=np.complex128)
    return unvectorize(expm_multiply(superop.mat * t, vectorize(rho0.mat)))
