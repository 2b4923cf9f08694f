"""Shell decomposition of operators around a site and exponential decay fits.

``P_r`` is the Hilbert-Schmidt projection onto operators supported on the
ball of radius ``r``: normalized partial trace over the outside, then
identity re-embedded there. Shells are ``O_0 = P_0(O)`` and
``O_r = P_r(O) - P_{r-1}(O)``.
"""

import logging
import math
from dataclasses import dataclass

import logfire
import numpy as np
import numpy.typing as npt

from lindblad_lab.core.exceptions import FitError, ParameterError
from lindblad_lab.core.tolerances import SHELL_NOISE_FLOOR
from lindblad_lab.core.workers import run_ordered
from lindblad_lab.densemath import ComplexMatrix, as_matrix, kron, operator_norm, partial_trace
from lindblad_lab.filters import FilterSpec, ground_filter
from lindblad_lab.jumps.ground import ground_jump_eigenbasis
from lindblad_lab.models import HamiltonianSpec, LatticeGeometry, pauli_site_operator

logger = logging.getLogger(__name__)


def embed(op: npt.ArrayLike, sites: tuple[int, ...], geometry: LatticeGeometry) -> ComplexMatrix:
    """Operator on ``sites`` (ascending) tensored with identity on every other site."""
    n = geometry.n_sites
    outside = [k for k in range(n) if k not in sites]
    order = list(sites) + outside
    d_out = geometry.local_dim ** len(outside)
    full = kron(as_matrix(op, square=True), np.eye(d_out, dtype=np.complex128))
    dims = [geometry.local_dim] * n
    inverse = list(np.argsort(order))
    tensor = full.reshape(dims + dims).transpose(inverse + [n + k for k in inverse])
    return tensor.reshape(geometry.hilbert_dim, geometry.hilbert_dim)


def project_to_ball(o: npt.ArrayLike, geometry: LatticeGeometry, site: int, radius: int) -> ComplexMatrix:
    """Hilbert-Schmidt projection of ``o`` onto operators supported on ``B_site(radius)``."""
    if radius < 0:
        raise ParameterError("Ball radius must be nonnegative", details={"radius": radius})
    m = as_matrix(o, square=True)
    ball = geometry.ball(site, radius)
    if len(ball) == geometry.n_sites:
        return m.copy()
    d_out = geometry.local_dim ** (geometry.n_sites - len(ball))
    reduced = partial_trace(m, geometry.site_dims, keep=ball) / d_out
    return embed(reduced, ball, geometry)


@dataclass(frozen=True)
class ShellDecomposition:
    """Shells ``O_r`` around ``site`` for ``r = 0 .. covering radius``.

    Attributes:
        site: Center ``j``.
        radii: ``0, 1, ...``.
        shells: ``O_r`` matrices.
        norms: Operator norms ``||O_r||``.
        reconstruction_error: ``||O - sum_r O_r||``.
    """

    site: int
    radii: tuple[int, ...]
    shells: tuple[ComplexMatrix, ...]
    norms: npt.NDArray[np.float64]
    reconstruction_error: float

    def nonzero_count(self, floor: float = SHELL_NOISE_FLOOR) -> int:
        return int(np.count_nonzero(self.norms > floor))


def shell_decompose(o: npt.ArrayLike, geometry: LatticeGeometry, site: int) -> ShellDecomposition:
    m = as_matrix(o, square=True)
    geometry.check_site(site)
    radii = tuple(range(geometry.covering_radius(site) + 1))
    with logfire.span("shell_decompose", site=site, shells=len(radii)):
        projections = run_ordered(lambda r: project_to_ball(m, geometry, site, r), list(radii))
        shells = [projections[0]] + [projections[r] - projections[r - 1] for r in radii[1:]]
        norms = np.array(run_ordered(operator_norm, shells), dtype=np.float64)
    error = operator_norm(m - sum(shells))
    return ShellDecomposition(
        site=site,
        radii=radii,
        shells=tuple(shells),
        norms=norms,
        reconstruction_error=error,
    )


@dataclass(frozen=True)
class DecayFit:
    """``||O_r|| ~ constant * exp(-mu_decay r)``.

    Attributes:
        constant: ``C``.
        mu_decay: Decay rate.
        radii_used: Radii whose shell norm exceeded the noise floor.
        residual: RMS deviation of the log-linear fit.
    """

    constant: float
    mu_decay: float
    radii_used: tuple[int, ...]
    residual: float

    def predict(self, radius: float) -> float:
        return self.constant * math.exp(-self.mu_decay * radius)


def decay_fit(dec: ShellDecomposition, floor: float = SHELL_NOISE_FLOOR) -> DecayFit:
    """Least-squares line through ``(r, log ||O_r||)`` for shells above ``floor``.

    Raises:
        FitError: Fewer than three shells above the floor.
    """
    mask = dec.norms > floor
    radii = np.asarray(dec.radii, dtype=np.float64)[mask]
    if radii.shape[0] < 3:
        raise FitError(
            "Decay fit needs at least three nonzero shells",
            details={"nonzero_shells": int(radii.shape[0]), "site": dec.site},
        )
    logs = np.log(dec.norms[mask])
    slope, intercept = np.polyfit(radii, logs, 1)
    residual = float(np.sqrt(np.mean((logs - (slope * radii + intercept)) ** 2)))
    fit = DecayFit(
        constant=float(np.exp(intercept)),
        mu_decay=float(-slope),
        radii_used=tuple(int(r) for r in radii),
        residual=residual,
    )
    logger.debug("Decay fit", extra={"mu_decay": fit.mu_decay, "C": fit.constant, "shells": len(fit.radii_used)})
    return fit


def jump_shells(
    hamiltonian: HamiltonianSpec,
    site: int | None = None,
    letter: str = "X",
    filt: FilterSpec | None = None,
) -> ShellDecomposition:
    """Shells of the ground-state jump for a single-site coupling, centered on the coupling site.

    The site defaults to the middle of the chain.
    """
    geometry = hamiltonian.geometry
    if geometry is None:
        raise ParameterError("Quasi-locality needs a lattice geometry")
    site = geometry.middle_site if site is None else site
    filt = filt or ground_filter(hamiltonian.gap_hint or 0.0, hamiltonian.e_max)
    coupling = pauli_site_operator(geometry, site, letter)
    k, _ = ground_jump_eigenbasis(hamiltonian, coupling, filt, label=f"{letter}{site}")
    return shell_decompose(k, geometry, site)
