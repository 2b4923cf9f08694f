"""Empirical error order of the dilation channel against the exact semigroup."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import logfire
import numpy as np
import numpy.typing as npt

from lindblad_lab.core.exceptions import FitError, ParameterError
from lindblad_lab.core.workers import run_ordered
from lindblad_lab.densemath import DensityMatrix, trace_norm
from lindblad_lab.engine.dilation import DilationChannel
from lindblad_lab.engine.propagation import exact_state
from lindblad_lab.engine.superoperator import assemble
from lindblad_lab.jumps.types import LindbladSpec

logger = logging.getLogger(__name__)

DEFAULT_DT_LIST: tuple[float, ...] = tuple(2.0**-k for k in range(4, 11))
DEFAULT_T_TOTAL = 2.0


@dataclass(frozen=True)
class PowerLawFit:
    """``error ~ constant * dt^slope`` fitted in log-log space."""

    slope: float
    constant: float
    r_squared: float


@dataclass(frozen=True)
class ErrorOrderReport:
    """Single-step and accumulated dilation errors with their fits.

    Attributes:
        dts: Step sizes.
        single_step_errors: ``||exp(L dt) rho0 - Phi_dt(rho0)||_1``.
        accumulated_errors: ``||exp(L T) rho0 - Phi_dt^r(rho0)||_1`` with ``T = r dt``.
        single_step: Fit of the single-step errors (slope near 2).
        accumulated: Fit of the accumulated errors (slope near 1).
        t_total: ``T``.
    """

    dts: npt.NDArray[np.float64]
    single_step_errors: npt.NDArray[np.float64]
    accumulated_errors: npt.NDArray[np.float64]
    single_step: PowerLawFit
    accumulated: PowerLawFit
    t_total: float


def fit_power_law(x: npt.ArrayLike, y: npt.ArrayLike) -> PowerLawFit:
    """Least-squares line through ``(log x, log y)``."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise FitError("Power-law fit needs positive data", details={"min_y": float(np.min(ys)) if ys.size else None})
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    predicted = slope * lx + intercept
    ss_res = float(np.sum((ly - predicted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(slope=float(slope), constant=float(np.exp(intercept)), r_squared=r_squared)


def channel_error_order(
    spec: LindbladSpec,
    rho0: DensityMatrix,
    dt_list: Sequence[float] = DEFAULT_DT_LIST,
    t_total: float = DEFAULT_T_TOTAL,
) -> ErrorOrderReport:
    """Fit single-step (``O(dt^2)``) and accumulated (``O(T dt)``) dilation errors.

    Raises:
        ParameterError: Fewer than four step sizes, or a step that does not divide ``t_total``.
        FitError: An error vanished identically, so no slope exists.
    """
    dts = np.asarray(sorted(dt_list, reverse=True), dtype=np.float64)
    if dts.shape[0] < 4:
        raise ParameterError("Error-order fits need at least four step sizes", details={"count": int(dts.shape[0])})
    superop = assemble(spec)
    x0 = np.array(rho0.mat, dtype=np.complex128)
    reference_final = exact_state(spec, rho0, t_total, superop)

    def cell(dt: float) -> tuple[float, float]:
        r = int(round(t_total / dt))
        if abs(r * dt - t_total) > 1e-9 * max(1.0, t_total):
            raise ParameterError("t_total must be an integer multiple of every dt", details={"dt": dt, "t_total": t_total})
        channel = DilationChannel.build(spec, dt)
        single = trace_norm(exact_state(spec, rho0, dt, superop) - channel(x0))
        x = x0
        for _ in range(r):
            x = channel(x)
        return single, trace_norm(reference_final - x)

    with logfire.span("channel_error_order", dim=spec.dim, points=dts.shape[0], t_total=t_total):
        errors = run_ordered(cell, list(dts))
    single = np.array([e[0] for e in errors])
    accumulated = np.array([e[1] for e in errors])
    report = ErrorOrderReport(
        dts=dts,
        single_step_errors=single,
        accumulated_errors=accumulated,
        single_step=fit_power_law(dts, single),
        accumulated=fit_power_law(dts, accumulated),
        t_total=t_total,
    )
    logger.info(
        "Dilation error order fitted",
        extra={"single_slope": report.single_step.slope, "accumulated_slope": report.accumulated.slope},
    )
    return report
