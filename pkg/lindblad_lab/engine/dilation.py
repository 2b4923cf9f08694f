"""First-order dilation channel: one ancilla qubit per jump, then the coherent step.

For a jump ``K`` (weight folded in) the dilated Hamiltonian on
ancilla (x) system is ``[[0, K^dag], [K, 0]]``. Evolving ``|0><0| (x) rho`` for
``sqrt(dt)`` and tracing out the ancilla reproduces ``exp(dt D_K)`` to
``O(dt^2)``.
"""

import logging
import math
from dataclasses import dataclass

import logfire
import numpy as np
import scipy.linalg

from lindblad_lab.core.exceptions import DomainError, ParameterError
from lindblad_lab.core.tolerances import PSD_FLOOR
from lindblad_lab.densemath import (
    ComplexMatrix,
    DensityMatrix,
    as_density,
    dagger,
    expm,
    hermitian_part,
    kron,
    partial_trace,
)
from lindblad_lab.engine.propagation import EvolutionMethod, EvolutionResult, StateRecorder
from lindblad_lab.jumps.types import LindbladSpec

logger = logging.getLogger(__name__)

_KET0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128)
_RAISE = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)  # |0><1|
_LOWER = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128)  # |1><0|


def _check_dt(dt: float) -> None:
    if dt < 0 or not math.isfinite(dt):
        raise ParameterError("Time step must be finite and nonnegative", details={"dt": dt})


def dilated_unitary(k_scaled: ComplexMatrix, dt: float) -> ComplexMatrix:
    """``exp(-i H_dil sqrt(dt))`` with ``H_dil = |0><1| (x) K^dag + |1><0| (x) K``."""
    h_dil = kron(_RAISE, dagger(k_scaled)) + kron(_LOWER, k_scaled)
    return expm(-1j * math.sqrt(dt) * h_dil)


def dilation_kraus(k_scaled: ComplexMatrix, dt: float) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Kraus pair ``(<0|U|0>, <1|U|0>)`` of the single-jump dilation."""
    d = k_scaled.shape[0]
    u = dilated_unitary(k_scaled, dt)
    return u[:d, :d], u[d:, :d]


@dataclass(frozen=True)
class DilationChannel:
    """One dilation step for a fixed ``dt``, reusable across steps.

    Attributes:
        dim: System dimension.
        dt: Time step.
        kraus_pairs: One ``(M0, M1)`` pair per jump, applied in order.
        coherent_unitary: ``exp(-i G dt)``, applied last.
    """

    dim: int
    dt: float
    kraus_pairs: tuple[tuple[ComplexMatrix, ComplexMatrix], ...]
    coherent_unitary: ComplexMatrix

    @classmethod
    def build(cls, spec: LindbladSpec, dt: float) -> "DilationChannel":
        _check_dt(dt)
        pairs = tuple(dilation_kraus(j.scaled_operator, dt) for j in spec.jumps if j.weight > 0.0)
        return cls(dim=spec.dim, dt=dt, kraus_pairs=pairs, coherent_unitary=expm(-1j * dt * spec.coherent))

    def __call__(self, rho: ComplexMatrix) -> ComplexMatrix:
        x = rho
        for m0, m1 in self.kraus_pairs:
            x = m0 @ x @ dagger(m0) + m1 @ x @ dagger(m1)
        u = self.coherent_unitary
        return u @ x @ dagger(u)


def dilation_step(spec: LindbladSpec, rho: DensityMatrix, dt: float) -> DensityMatrix:
    """One step with the ancilla kept explicitly and traced out after each jump."""
    _check_dt(dt)
    d = spec.dim
    x = as_density(rho)
    for jump in spec.jumps:
        if jump.weight == 0.0:
            continue
        u = dilated_unitary(jump.scaled_operator, dt)
        joint = u @ kron(_KET0, x) @ dagger(u)
        x = partial_trace(joint, [2, d], keep=[1])
    u = expm(-1j * dt * spec.coherent)
    return DensityMatrix.from_propagated(u @ x @ dagger(u))


def evolve_dilation(
    spec: LindbladSpec,
    rho0: DensityMatrix,
    t_total: float,
    dt: float,
    record_every: int = 1,
) -> EvolutionResult:
    """``r = t_total / dt`` repeated dilation steps.

    Raises:
        ParameterError: ``dt <= 0`` or ``t_total`` not an integer multiple of ``dt``.
    """
    if dt <= 0 or t_total < 0:
        raise ParameterError("Dilation needs dt > 0 and t_total >= 0", details={"dt": dt, "t_total": t_total})
    r = int(round(t_total / dt))
    if abs(r * dt - t_total) > 1e-9 * max(1.0, t_total):
        raise ParameterError("t_total must be an integer multiple of dt", details={"t_total": t_total, "dt": dt})
    channel = DilationChannel.build(spec, dt)
    recorder = StateRecorder()
    x = np.array(rho0.mat, dtype=np.complex128)
    recorder.record(0.0, x)
    with logfire.span("evolve_dilation", dim=spec.dim, steps=r, dt=dt):
        for step in range(1, r + 1):
            x = hermitian_part(channel(x))
            if step % record_every == 0 or step == r:
                recorder.record(step * dt, x)
    return recorder.result(EvolutionMethod.DILATION)


def dilation_choi(spec: LindbladSpec, dt: float) -> ComplexMatrix:
    """Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)`` of one dilation step.

    Raises:
        DomainError: The Choi matrix is not PSD or not trace preserving.
    """
    channel = DilationChannel.build(spec, dt)
    d = spec.dim
    choi = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=np.complex128)
            unit[i, j] = 1.0
            choi += kron(unit, channel(unit))
    floor = float(np.min(scipy.linalg.eigvalsh(hermitian_part(choi))))
    if floor < PSD_FLOOR:
        raise DomainError("Dilation Choi matrix is not positive", details={"min_eigenvalue": floor})
    tp_defect = float(np.max(np.abs(partial_trace(choi, [d, d], keep=[0]) - np.eye(d))))
    if tp_defect > 1e-11:
        raise DomainError("Dilation channel is not trace preserving", details={"defect": tp_defect})
    logger.debug("Dilation Choi verified", extra={"dim": d, "min_eigenvalue": floor, "tp_defect": tp_defect})
    return choi
