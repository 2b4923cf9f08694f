"""Frequency/time filter pairs that define the jump operator families.

Fourier convention::

    f(s)      = 1/(2 pi) * integral f_hat(w) exp(-i w s) dw
    f_hat(w)  = integral f(s) exp(+i w s) ds

so that ``integral f(s) exp(iHs) A exp(-iHs) ds`` has eigenbasis matrix
elements ``f_hat(lambda_i - lambda_j) A_ij``.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
import numpy.typing as npt
from scipy.special import erf

from lindblad_lab.core.exceptions import ParameterError, ResolutionError

logger = logging.getLogger(__name__)

Profile = Callable[[npt.ArrayLike], npt.NDArray[np.complex128]]

# relative envelope level at which time profiles are truncated
_ENVELOPE_CUTOFF = 1e-10
_LOG_CUTOFF = math.log(1.0 / _ENVELOPE_CUTOFF)


class FilterKind(StrEnum):
    GROUND = "ground"
    GIBBS_GAUSSIAN = "gibbs_gaussian"
    THERMAL_SINGLE_JUMP = "thermal_single_jump"
    PROJECTOR = "projector"


@dataclass(frozen=True)
class FilterParams:
    """Physical parameters of a filter; unused ones stay None."""

    delta: float | None = None
    e_max: float | None = None
    beta: float | None = None
    sigma: float | None = None
    mu: float | None = None


@dataclass(frozen=True)
class FilterSpec:
    """A filter pair ``(f_hat, f)`` with its truncation metadata.

    Attributes:
        kind: Which construction produced the filter.
        freq_profile: Vectorized ``w -> f_hat(w)``.
        time_profile: Vectorized ``s -> f(s)``.
        params: Physical parameters.
        support: Half-width ``S`` of the truncated time support ``[-S, S]``.
        nodes: Default quadrature node count ``M`` (even).
        bandwidth: Radius beyond which ``|f_hat|`` is negligible.
    """

    kind: FilterKind
    freq_profile: Profile = field(repr=False)
    time_profile: Profile = field(repr=False)
    params: FilterParams
    support: float
    nodes: int
    bandwidth: float

    def freq(self, omega: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        return self.freq_profile(omega)

    def time(self, s: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        return self.time_profile(s)

    @property
    def applies_to_eigenvalues(self) -> bool:
        """Projector profiles act on energies, not on Bohr frequencies."""
        return self.kind is FilterKind.PROJECTOR


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform trapezoidal rule on ``[-S, S]``.

    Attributes:
        nodes: ``s_k``, symmetric about 0.
        weights: Trapezoid weights (half weight at both ends).
    """

    nodes: npt.NDArray[np.float64]
    weights: npt.NDArray[np.float64]

    @property
    def spacing(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def half_width(self) -> float:
        return float(self.nodes[-1])

    def integrate(self, values: npt.ArrayLike) -> complex:
        return complex(np.dot(self.weights, np.asarray(values)))


def trapezoid_grid(half_width: float, n_nodes: int) -> QuadratureGrid:
    """``n_nodes`` equispaced nodes on ``[-half_width, half_width]``."""
    if half_width <= 0:
        raise ParameterError("Quadrature half-width must be positive", details={"S": half_width})
    if n_nodes < 8 or n_nodes % 2:
        raise ParameterError("Quadrature node count must be even and at least 8", details={"M": n_nodes})
    nodes = np.linspace(-half_width, half_width, n_nodes)
    h = 2.0 * half_width / (n_nodes - 1)
    weights = np.full(n_nodes, h)
    weights[0] = weights[-1] = 0.5 * h
    return QuadratureGrid(nodes=nodes, weights=weights)


def _nodes_for(support: float, omega_max: float) -> int:
    """Smallest even node count with spacing at most pi / (2 omega_max)."""
    h_target = math.pi / (2.0 * omega_max)
    m = math.ceil(2.0 * support / h_target) + 1
    return max(8, m + (m % 2))


def _real(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return np.asarray(x, dtype=np.float64)


# === Ground-state band-pass ===


def ground_filter(delta: float, e_max: float) -> FilterSpec:
    """erf-smoothed band-pass covering ``[-2 E_max - delta, -delta]``.

    ``f_hat(w) = (erf((w + a)/w0) - erf((w + b)/w0)) / 2`` with
    ``a = 2 E_max + 3 delta / 2``, ``b = delta / 2``, ``w0 = delta / 10``,
    clamped to exactly zero for ``w >= 0``. Its time dual is closed form.
    """
    if delta <= 0 or e_max <= 0 or delta > 2.0 * e_max:
        raise ParameterError(
            "ground_filter requires 0 < delta <= 2 E_max",
            details={"delta": delta, "e_max": e_max},
        )
    a = 2.0 * e_max + 1.5 * delta
    b = 0.5 * delta
    width = 0.1 * delta

    def freq(omega: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        w = _real(omega)
        value = 0.5 * (erf((w + a) / width) - erf((w + b) / width))
        return np.where(w >= 0.0, 0.0, value).astype(np.complex128)

    def time(s: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        t = _real(s)
        small = np.abs(t) < 1e-12
        safe = np.where(small, 1.0, t)
        envelope = np.exp(-((width * safe) ** 2) / 4.0)
        value = envelope * (np.exp(1j * a * safe) - np.exp(1j * b * safe)) / (2j * np.pi * safe)
        return np.where(small, (a - b) / (2.0 * np.pi), value).astype(np.complex128)

    support = 2.0 * math.sqrt(_LOG_CUTOFF) / width
    bohr_range = 2.0 * e_max
    return FilterSpec(
        kind=FilterKind.GROUND,
        freq_profile=freq,
        time_profile=time,
        params=FilterParams(delta=delta, e_max=e_max),
        support=support,
        nodes=_nodes_for(support, bohr_range),
        bandwidth=a + 6.0 * width,
    )


# === Gibbs filters ===


def _check_thermal(beta: float, sigma: float) -> None:
    if beta < 0 or sigma <= 0:
        raise ParameterError("Thermal filters need beta >= 0 and sigma > 0", details={"beta": beta, "sigma": sigma})


def default_thermal_sigma(beta: float, e_max: float) -> float:
    """Energy resolution ``sqrt(2 / beta)`` matched to the temperature.

    Capped at the spectral span ``2 E_max``, which is also the value at
    ``beta = 0``.
    """
    span = 2.0 * e_max
    if beta <= 0:
        return span
    return min(math.sqrt(2.0 / beta), span)


def gibbs_gaussian_filter(beta: float, sigma: float, e_max: float | None = None) -> FilterSpec:
    """Gaussian ``f(t) = (sigma^2/pi)^(1/4) exp(-sigma^2 t^2 / 2)``, unit L2 norm."""
    _check_thermal(beta, sigma)
    norm = (sigma**2 / math.pi) ** 0.25
    freq_norm = norm * math.sqrt(2.0 * math.pi) / sigma

    def freq(omega: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        w = _real(omega)
        return (freq_norm * np.exp(-(w**2) / (2.0 * sigma**2))).astype(np.complex128)

    def time(s: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        t = _real(s)
        return (norm * np.exp(-(sigma**2) * t**2 / 2.0)).astype(np.complex128)

    support = math.sqrt(2.0 * _LOG_CUTOFF) / sigma
    bandwidth = math.sqrt(2.0 * _LOG_CUTOFF) * sigma
    return FilterSpec(
        kind=FilterKind.GIBBS_GAUSSIAN,
        freq_profile=freq,
        time_profile=time,
        params=FilterParams(beta=beta, sigma=sigma, e_max=e_max),
        support=support,
        nodes=_nodes_for(support, bandwidth + 2.0 * (e_max or 0.0)),
        bandwidth=bandwidth,
    )


def thermal_single_jump_filter(beta: float, sigma: float, e_max: float | None = None) -> FilterSpec:
    """``f_hat(v) = exp(-beta v / 4 - v^2 / (4 sigma^2))`` with ``f_hat(0) = 1``.

    ``|f_hat(-v)|^2 = exp(beta v) |f_hat(v)|^2`` holds identically.
    """
    _check_thermal(beta, sigma)
    prefactor = sigma / math.sqrt(math.pi) * math.exp(beta**2 * sigma**2 / 16.0)

    def freq(omega: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        v = _real(omega)
        return np.exp(-beta * v / 4.0 - v**2 / (4.0 * sigma**2)).astype(np.complex128)

    def time(s: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        t = _real(s)
        phase = np.exp(0.5j * beta * sigma**2 * t)
        return (prefactor * phase * np.exp(-(sigma**2) * t**2)).astype(np.complex128)

    support = math.sqrt(_LOG_CUTOFF) / sigma
    bandwidth = 0.5 * beta * sigma**2 + 2.0 * math.sqrt(_LOG_CUTOFF) * sigma
    return FilterSpec(
        kind=FilterKind.THERMAL_SINGLE_JUMP,
        freq_profile=freq,
        time_profile=time,
        params=FilterParams(beta=beta, sigma=sigma, e_max=e_max),
        support=support,
        nodes=_nodes_for(support, bandwidth + 2.0 * (e_max or 0.0)),
        bandwidth=bandwidth,
    )


# === Spectral projector ===


def smooth_step(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, monotone in between."""
    xs = _real(x)

    def bump(y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        positive = y > 0
        return np.where(positive, np.exp(-1.0 / np.where(positive, y, 1.0)), 0.0)

    left, right = bump(xs), bump(1.0 - xs)
    return np.where(xs <= 0, 0.0, np.where(xs >= 1, 1.0, left / np.where(left + right > 0, left + right, 1.0)))


def projector_filter(mu: float, delta: float, e_max: float) -> FilterSpec:
    """Smooth indicator of ``[mu + delta, E_max + delta]`` applied to energies.

    The profile is 0 below ``mu``, rises on ``[mu, mu + delta]``, is 1 up to
    ``E_max + delta`` and returns to 0 by ``E_max + 2 delta`` so that it
    has an integrable time dual (computed by trapezoidal inverse transform).
    """
    if delta <= 0:
        raise ParameterError("projector_filter requires delta > 0", details={"delta": delta})
    if mu >= e_max:
        raise ParameterError("Threshold mu must lie below the spectral bound", details={"mu": mu, "e_max": e_max})
    top = e_max + delta

    def freq(omega: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        w = _real(omega)
        return (smooth_step((w - mu) / delta) * (1.0 - smooth_step((w - top) / delta))).astype(np.complex128)

    omega_grid = np.linspace(mu, top + delta, 4097)
    omega_weights = np.full(omega_grid.shape, omega_grid[1] - omega_grid[0])
    omega_weights[0] = omega_weights[-1] = 0.5 * omega_weights[0]
    weighted = omega_weights * freq(omega_grid)

    def time(s: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        t = np.atleast_1d(_real(s)).reshape(-1)
        values = np.empty(t.shape, dtype=np.complex128)
        for start in range(0, t.shape[0], 256):
            chunk = t[start : start + 256]
            values[start : start + 256] = np.exp(-1j * np.multiply.outer(chunk, omega_grid)) @ weighted
        return (values / (2.0 * np.pi)).reshape(np.shape(s))

    support = 400.0 / delta
    return FilterSpec(
        kind=FilterKind.PROJECTOR,
        freq_profile=freq,
        time_profile=time,
        params=FilterParams(delta=delta, e_max=e_max, mu=mu),
        support=support,
        nodes=_nodes_for(support, top + delta + abs(mu)),
        bandwidth=top + delta,
    )


# === Quadrature ===


def build_quadrature(spec: FilterSpec, n_nodes: int | None = None) -> QuadratureGrid:
    """Trapezoidal grid on ``[-S, S]`` for ``spec``.

    Raises:
        ParameterError: ``n_nodes`` odd or below 8.
        ResolutionError: node spacing above ``pi / (2 (E_max + |mu|))``.
    """
    m = spec.nodes if n_nodes is None else n_nodes
    grid = trapezoid_grid(spec.support, m)
    e_max = spec.params.e_max if spec.params.e_max is not None else spec.bandwidth
    check_resolution(grid, e_max + abs(spec.params.mu or 0.0))
    logger.debug("Built quadrature grid", extra={"kind": str(spec.kind), "M": m, "S": spec.support})
    return grid


def check_resolution(grid: QuadratureGrid, e_max: float) -> None:
    """Raise ResolutionError when the node spacing exceeds ``pi / (2 E_max)``.

    Bohr frequencies lie in ``[-2 E_max, 2 E_max]``; coarser grids alias them.
    """
    limit = math.pi / (2.0 * e_max)
    if grid.spacing > limit:
        raise ResolutionError(
            "Quadrature node spacing under-resolves the spectral range",
            details={"spacing": grid.spacing, "limit": limit, "M": grid.nodes.shape[0], "S": grid.half_width},
        )


def forward_transform(spec: FilterSpec, omega: npt.ArrayLike, grid: QuadratureGrid) -> npt.NDArray[np.complex128]:
    """Quadrature estimate of ``f_hat(w) = integral f(s) exp(i w s) ds``."""
    samples = grid.weights * spec.time(grid.nodes)
    return phase_sum(np.atleast_1d(_real(omega)), grid.nodes, samples)


def phase_sum(
    frequencies: npt.NDArray[np.float64],
    nodes: npt.NDArray[np.float64],
    samples: npt.NDArray[np.complex128],
    chunk: int = 1024,
) -> npt.NDArray[np.complex128]:
    """``sum_k samples_k exp(i frequency s_k)`` for every frequency, in node chunks."""
    flat = frequencies.reshape(-1)
    total = np.zeros(flat.shape, dtype=np.complex128)
    for start in range(0, nodes.shape[0], chunk):
        block = nodes[start : start + chunk]
        total += np.exp(1j * np.multiply.outer(flat, block)) @ samples[start : start + chunk]
    return total.reshape(frequencies.shape)


def fourier_mismatch(spec: FilterSpec, omega: npt.ArrayLike, grid: QuadratureGrid | None = None) -> float:
    """Max deviation between the quadrature transform of ``f`` and ``f_hat`` on ``omega``."""
    grid = grid or build_quadrature(spec)
    estimate = forward_transform(spec, omega, grid)
    return float(np.max(np.abs(estimate - spec.freq(np.atleast_1d(_real(omega))))))
