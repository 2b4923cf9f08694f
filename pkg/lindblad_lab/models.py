"""Model Hamiltonians, coupling operators and lattice geometry.

Site 0 is the leftmost Kronecker factor; basis state ``|b_0 b_1 ... b_{n-1}>``
has index ``sum b_k 2^(n-1-k)``.
"""

import itertools
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from lindblad_lab.core.exceptions import DimensionError, ParameterError
from lindblad_lab.core.tolerances import HERMITIAN_TOL, MAX_QUBITS
from lindblad_lab.densemath import (
    ComplexMatrix,
    EigenDecomposition,
    as_matrix,
    eig_hermitian,
    hermitian_part,
    hermiticity_defect,
    kron_all,
    operator_norm,
)

logger = logging.getLogger(__name__)

PAULI: dict[str, ComplexMatrix] = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

_TOKEN = re.compile(r"^([XYZ])(\d+)$")


@dataclass(frozen=True)
class LatticeGeometry:
    """Open chain of ``n_sites`` qubits with the graph distance ``|j - k|``.

    Attributes:
        n_sites: Number of sites.
        local_dim: Hilbert-space dimension per site.
        dimension: Spatial dimension (chains only).
    """

    n_sites: int
    local_dim: int = 2
    dimension: int = 1

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ParameterError("A lattice needs at least one site", details={"n_sites": self.n_sites})
        if self.dimension != 1:
            raise ParameterError("Only one-dimensional chains are supported")

    @property
    def hilbert_dim(self) -> int:
        return int(self.local_dim**self.n_sites)

    @property
    def diameter(self) -> int:
        return self.n_sites - 1

    @property
    def site_dims(self) -> list[int]:
        return [self.local_dim] * self.n_sites

    def check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise ParameterError(f"Site {site} outside the lattice [0, {self.n_sites})")

    def distance(self, j: int, k: int) -> int:
        self.check_site(j)
        self.check_site(k)
        return abs(j - k)

    def ball(self, j: int, r: int) -> tuple[int, ...]:
        """Sites within distance ``r`` of ``j``; ``ball(j, 0) == (j,)``."""
        if r < 0:
            raise ParameterError("Ball radius must be nonnegative", details={"r": r})
        self.check_site(j)
        return tuple(k for k in range(self.n_sites) if abs(k - j) <= r)

    def covering_radius(self, j: int) -> int:
        """Smallest radius whose ball around ``j`` is the whole lattice."""
        self.check_site(j)
        return max(j, self.n_sites - 1 - j)

    @property
    def middle_site(self) -> int:
        return (self.n_sites - 1) // 2


@dataclass(frozen=True)
class PauliString:
    """``coefficient * prod_k letter_k`` with letters keyed by site.

    Attributes:
        coefficient: Complex prefactor.
        letters: ``(site, letter)`` pairs sorted by site; empty for the identity.
    """

    coefficient: complex
    letters: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        sites = [s for s, _ in self.letters]
        if len(set(sites)) != len(sites):
            raise ParameterError("Pauli string repeats a site", details={"letters": self.letters})
        if any(letter not in ("X", "Y", "Z") for _, letter in self.letters):
            raise ParameterError("Pauli letters must be X, Y or Z", details={"letters": self.letters})
        object.__setattr__(self, "letters", tuple(sorted(self.letters)))

    @classmethod
    def from_label(cls, label: str, coefficient: complex = 1.0) -> "PauliString":
        """Parse ``"X0 Z2"``; ``"I"`` or an empty label is the identity."""
        letters: list[tuple[int, str]] = []
        for token in label.split():
            if token == "I":
                continue
            match = _TOKEN.match(token)
            if match is None:
                raise ParameterError(f"Cannot parse Pauli token {token!r}")
            letters.append((int(match.group(2)), match.group(1)))
        return cls(coefficient=complex(coefficient), letters=tuple(letters))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.letters)

    @property
    def label(self) -> str:
        return " ".join(f"{letter}{site}" for site, letter in self.letters) or "I"

    def to_dense(self, geometry: LatticeGeometry) -> ComplexMatrix:
        for site in self.support:
            geometry.check_site(site)
        factors = [PAULI["I"]] * geometry.n_sites
        for site, letter in self.letters:
            factors[site] = PAULI[letter]
        return self.coefficient * kron_all(factors)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Hermitian model Hamiltonian with its dense matrix.

    Attributes:
        dense: Materialized Hermitian matrix.
        geometry: Lattice, or None for matrices without site structure.
        terms: Pauli terms that sum to ``dense`` (empty for dense-only input).
        gap_hint: Lower bound on ``lambda_1 - lambda_0``.
        norm_hint: Upper bound on ``||H||``.
        name: Short model label for reports.
    """

    dense: ComplexMatrix
    geometry: LatticeGeometry | None = None
    terms: tuple[PauliString, ...] = ()
    gap_hint: float | None = None
    norm_hint: float | None = None
    name: str = "custom"

    def __post_init__(self) -> None:
        m = np.array(as_matrix(self.dense, square=True), copy=True)
        defect = hermiticity_defect(m)
        if defect > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))):
            raise ParameterError("Hamiltonian is not Hermitian", details={"defect": defect})
        m = hermitian_part(m)
        m.setflags(write=False)
        object.__setattr__(self, "dense", m)
        if self.geometry is not None and self.geometry.hilbert_dim != m.shape[0]:
            raise DimensionError(
                "Hamiltonian dimension does not match the lattice",
                details={"dim": m.shape[0], "lattice_dim": self.geometry.hilbert_dim},
            )

        exact_gap = self.exact_gap
        if self.gap_hint is None:
            object.__setattr__(self, "gap_hint", 0.9 * exact_gap)
        elif self.gap_hint < 0 or exact_gap < self.gap_hint - 1e-12:
            raise ParameterError(
                "gap_hint exceeds the exact spectral gap",
                details={"gap_hint": self.gap_hint, "exact_gap": exact_gap},
            )
        if self.norm_hint is None:
            bound = sum(abs(t.coefficient) for t in self.terms) if self.terms else self.exact_norm
            object.__setattr__(self, "norm_hint", float(max(bound, self.exact_norm)))

    @property
    def dim(self) -> int:
        return int(self.dense.shape[0])

    @cached_property
    def spectrum(self) -> EigenDecomposition:
        return eig_hermitian(self.dense)

    @property
    def exact_gap(self) -> float:
        values = self.spectrum.eigenvalues
        return float(values[1] - values[0]) if values.shape[0] > 1 else 0.0

    @property
    def exact_norm(self) -> float:
        values = self.spectrum.eigenvalues
        return float(max(abs(values[0]), abs(values[-1])))

    @property
    def e_max(self) -> float:
        """Norm bound used to size filters."""
        return float(self.norm_hint or self.exact_norm)

    @classmethod
    def from_terms(
        cls,
        geometry: LatticeGeometry,
        terms: Iterable[PauliString],
        *,
        name: str = "pauli_terms",
        gap_hint: float | None = None,
        norm_hint: float | None = None,
    ) -> "HamiltonianSpec":
        if geometry.n_sites > MAX_QUBITS:
            raise DimensionError(
                "Too many qubits for dense matrices",
                details={"n_sites": geometry.n_sites, "cap": MAX_QUBITS},
            )
        terms = tuple(terms)
        dense = np.zeros((geometry.hilbert_dim, geometry.hilbert_dim), dtype=np.complex128)
        for term in terms:
            dense += term.to_dense(geometry)
        return cls(dense=dense, geometry=geometry, terms=terms, gap_hint=gap_hint, norm_hint=norm_hint, name=name)

    @classmethod
    def from_dense(
        cls,
        dense: ComplexMatrix,
        *,
        name: str = "dense",
        gap_hint: float | None = None,
        norm_hint: float | None = None,
    ) -> "HamiltonianSpec":
        """Wrap a Hermitian matrix; a qubit chain geometry is attached when the dimension is 2^n."""
        m = as_matrix(dense, square=True)
        dim = m.shape[0]
        geometry = None
        if dim > 1 and dim & (dim - 1) == 0:
            geometry = LatticeGeometry(n_sites=dim.bit_length() - 1)
        return cls(dense=m, geometry=geometry, gap_hint=gap_hint, norm_hint=norm_hint, name=name)


# === Constructors ===


def _chain(n: int) -> LatticeGeometry:
    if n > MAX_QUBITS:
        raise DimensionError("Too many qubits for dense matrices", details={"n_sites": n, "cap": MAX_QUBITS})
    return LatticeGeometry(n_sites=n)


def tfim_chain(n: int, g: float = 1.0, J: float = 1.0) -> HamiltonianSpec:
    """Open transverse-field Ising chain ``H = -g sum Z_i - J sum X_i X_{i+1}``."""
    geometry = _chain(n)
    terms = [PauliString(-g, ((i, "Z"),)) for i in range(n)]
    terms += [PauliString(-J, ((i, "X"), (i + 1, "X"))) for i in range(n - 1)]
    return HamiltonianSpec.from_terms(geometry, terms, name=f"tfim(n={n},g={g},J={J})")


def pauli_site_operator(geometry: LatticeGeometry, site: int, letter: str) -> ComplexMatrix:
    """Single-site Pauli ``letter`` on ``site`` embedded in the chain."""
    geometry.check_site(site)
    if letter not in ("X", "Y", "Z"):
        raise ParameterError(f"Unknown Pauli letter {letter!r}")
    return PauliString(1.0, ((site, letter),)).to_dense(geometry)


def local_windows(n: int, k: int) -> list[tuple[int, ...]]:
    return [tuple(range(start, start + k)) for start in range(n - k + 1)]


def random_local_hamiltonian(
    geometry: LatticeGeometry,
    k: int,
    seed: int,
    windows: Sequence[Sequence[int]] | None = None,
) -> HamiltonianSpec:
    """Random ``k``-local Hamiltonian.

    Every non-identity Pauli word supported inside a window of ``k``
    consecutive sites appears once, with a coefficient drawn uniformly from
    [-1, 1] by ``numpy.random.default_rng(seed)`` in enumeration order.
    """
    if not 1 <= k <= geometry.n_sites:
        raise ParameterError("Locality k must satisfy 1 <= k <= n", details={"k": k, "n": geometry.n_sites})
    if windows is None:
        windows = local_windows(geometry.n_sites, k)

    seen: set[tuple[tuple[int, str], ...]] = set()
    words: list[tuple[tuple[int, str], ...]] = []
    for window in windows:
        for letters in itertools.product("IXYZ", repeat=len(window)):
            word = tuple((site, letter) for site, letter in zip(window, letters, strict=True) if letter != "I")
            if word and word not in seen:
                seen.add(word)
                words.append(word)

    rng = np.random.default_rng(seed)
    coefficients = rng.uniform(-1.0, 1.0, size=len(words))
    terms = [PauliString(float(c), word) for c, word in zip(coefficients, words, strict=True)]
    return HamiltonianSpec.from_terms(geometry, terms, name=f"random_local(n={geometry.n_sites},k={k},seed={seed})")


def random_matrix(dim_rows: int, dim_cols: int, seed: int) -> ComplexMatrix:
    """Complex Gaussian matrix with unit-variance entries."""
    if dim_rows < 1 or dim_cols < 1:
        raise DimensionError("Matrix dimensions must be positive")
    rng = np.random.default_rng(seed)
    real = rng.standard_normal((dim_rows, dim_cols))
    imag = rng.standard_normal((dim_rows, dim_cols))
    return (real + 1j * imag) / np.sqrt(2.0)


def random_hermitian(dim: int, seed: int) -> ComplexMatrix:
    """Hermitian part of ``random_matrix(dim, dim, seed)``, scaled to unit spectral norm."""
    m = hermitian_part(random_matrix(dim, dim, seed))
    return m / operator_norm(m)


def pauli_terms_hamiltonian(n: int, terms: Sequence[tuple[complex, str]]) -> HamiltonianSpec:
    """Hamiltonian from ``[(coefficient, "X0 X1"), ...]``."""
    geometry = _chain(n)
    strings = [PauliString.from_label(label, coefficient) for coefficient, label in terms]
    return HamiltonianSpec.from_terms(geometry, strings, name=f"pauli_terms(n={n})")


# === Coupling operators ===


@dataclass(frozen=True)
class Coupling:
    """Named coupling operator ``A`` fed to the jump builders."""

    label: str
    operator: ComplexMatrix


def couplings_from_labels(geometry: LatticeGeometry, labels: Sequence[str]) -> list[Coupling]:
    """Expand coupling labels into operators.

    ``"X*"`` puts the letter on every site in site order; anything else is
    parsed as a Pauli string such as ``"Z1"`` or ``"X0 X1"``.
    """
    couplings: list[Coupling] = []
    for raw in labels:
        label = raw.strip()
        if len(label) == 2 and label[1] == "*":
            couplings.extend(
                Coupling(f"{label[0]}{site}", pauli_site_operator(geometry, site, label[0]))
                for site in range(geometry.n_sites)
            )
            continue
        string = PauliString.from_label(label)
        couplings.append(Coupling(string.label, string.to_dense(geometry)))
    if not couplings:
        raise ParameterError("At least one coupling operator is required")
    return couplings


def default_couplings(dim: int, seed: int = 0) -> list[Coupling]:
    """Default coupling set for a ``dim``-level system.

    Qubit registers get single-site X on every site. Any other dimension gets
    ``dim - 1`` seeded random Hermitian couplings (seeds ``seed, seed + 1, ...``):
    a single coupling leaves a dark state whenever an excited level is
    degenerate, while ``dim - 1`` generic ones connect the target to the whole
    orthogonal complement.
    """
    if dim > 1 and dim & (dim - 1) == 0:
        return couplings_from_labels(LatticeGeometry(n_sites=dim.bit_length() - 1), ["X*"])
    return [Coupling(f"herm(seed={seed + k})", random_hermitian(dim, seed + k)) for k in range(max(dim - 1, 1))]
