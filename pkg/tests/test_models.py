"""Tests for lattice geometry, Pauli strings and model Hamiltonians."""

import numpy as np
import pytest

from lindblad_lab.core.exceptions import DimensionError, ParameterError
from lindblad_lab.models import (
    HamiltonianSpec,
    LatticeGeometry,
    PauliString,
    couplings_from_labels,
    default_couplings,
    pauli_site_operator,
    pauli_terms_hamiltonian,
    random_local_hamiltonian,
    random_matrix,
    tfim_chain,
)


def tfim_by_bits(n: int, g: float, J: float) -> np.ndarray:
    """Reference TFIM built entry by entry on computational basis indices."""
    dim = 2**n
    h = np.zeros((dim, dim))
    for index in range(dim):
        bits = [(index >> (n - 1 - k)) & 1 for k in range(n)]
        h[index, index] = -g * sum(1 - 2 * b for b in bits)
        for k in range(n - 1):
            flipped = index ^ (1 << (n - 1 - k)) ^ (1 << (n - 2 - k))
            h[flipped, index] += -J
    return h


class TestLatticeGeometry:
    """Tests for chain geometry."""

    def test_ball_and_covering_radius(self):
        """Test balls are distance-closed and the covering radius reaches the far end."""
        geometry = LatticeGeometry(n_sites=5)
        assert geometry.ball(2, 0) == (2,)
        assert geometry.ball(2, 1) == (1, 2, 3)
        assert geometry.ball(0, 2) == (0, 1, 2)
        assert geometry.covering_radius(0) == 4
        assert geometry.covering_radius(2) == 2
        assert geometry.middle_site == 2

    def test_rejects_bad_site(self):
        """Test sites outside the chain are rejected."""
        with pytest.raises(ParameterError):
            LatticeGeometry(n_sites=3).ball(3, 0)

    def test_rejects_empty_chain(self):
        """Test a chain needs a site."""
        with pytest.raises(ParameterError):
            LatticeGeometry(n_sites=0)


class TestPauliString:
    """Tests for Pauli string parsing and materialization."""

    def test_from_label_sorts_sites(self):
        """Test letters are kept in site order."""
        string = PauliString.from_label("Z2 X0")
        assert string.letters == ((0, "X"), (2, "Z"))
        assert string.label == "X0 Z2"
        assert string.support == (0, 2)

    def test_identity_label(self):
        """Test I parses to the identity."""
        geometry = LatticeGeometry(n_sites=2)
        assert np.allclose(PauliString.from_label("I").to_dense(geometry), np.eye(4))

    def test_repeated_site_rejected(self):
        """Test a site may appear once."""
        with pytest.raises(ParameterError):
            PauliString.from_label("X0 Z0")

    def test_bad_token_rejected(self):
        """Test garbage tokens are rejected."""
        with pytest.raises(ParameterError):
            PauliString.from_label("Q1")

    def test_site_zero_is_leftmost(self):
        """Test Z0 acts on the most significant bit."""
        z0 = pauli_site_operator(LatticeGeometry(n_sites=2), 0, "Z")
        assert np.allclose(np.diag(z0), [1, 1, -1, -1])


class TestHamiltonians:
    """Tests for model constructors."""

    @pytest.mark.parametrize(("n", "g", "J"), [(2, 1.0, 1.0), (3, 1.0, 1.0), (4, 0.7, 1.3)])
    def test_tfim_matches_bit_oracle(self, n, g, J):
        """Test the Pauli-term TFIM equals the bitwise reference matrix."""
        assert np.allclose(tfim_chain(n, g, J).dense, tfim_by_bits(n, g, J), atol=1e-14)

    def test_tfim_hints(self, tfim3):
        """Test default hints bracket the exact gap and norm."""
        assert 0 < tfim3.gap_hint <= tfim3.exact_gap
        assert tfim3.norm_hint >= tfim3.exact_norm
        assert tfim3.norm_hint == pytest.approx(3 + 2)

    def test_gap_hint_above_exact_gap_rejected(self, tfim2):
        """Test an optimistic gap hint is refused."""
        with pytest.raises(ParameterError):
            HamiltonianSpec(dense=tfim2.dense, geometry=tfim2.geometry, gap_hint=tfim2.exact_gap + 0.1)

    def test_non_hermitian_rejected(self):
        """Test the Hamiltonian must be Hermitian."""
        with pytest.raises(ParameterError):
            HamiltonianSpec(dense=np.array([[0, 1], [0, 0]], dtype=complex))

    def test_geometry_mismatch_rejected(self):
        """Test the dense dimension must match the lattice."""
        with pytest.raises(DimensionError):
            HamiltonianSpec(dense=np.eye(2, dtype=complex), geometry=LatticeGeometry(n_sites=2))

    def test_qubit_cap(self):
        """Test more than ten qubits are refused."""
        with pytest.raises(DimensionError):
            tfim_chain(11)

    def test_pauli_terms(self):
        """Test an explicit term list."""
        h = pauli_terms_hamiltonian(2, [(-1.0, "X0 X1"), (0.5, "Z1")])
        assert np.allclose(h.dense, h.dense.conj().T)
        assert h.spectrum.eigenvalues.shape == (4,)

    def test_random_local_is_seeded(self):
        """Test the same seed reproduces the model and different seeds differ."""
        geometry = LatticeGeometry(n_sites=3)
        a = random_local_hamiltonian(geometry, 2, seed=5)
        b = random_local_hamiltonian(geometry, 2, seed=5)
        c = random_local_hamiltonian(geometry, 2, seed=6)
        assert np.array_equal(a.dense, b.dense)
        assert not np.allclose(a.dense, c.dense)
        # 15 two-site words per window, minus the single-site words the windows share
        assert len(a.terms) == 15 + 15 - 3

    def test_random_local_locality_bounds(self):
        """Test k outside [1, n] is refused."""
        with pytest.raises(ParameterError):
            random_local_hamiltonian(LatticeGeometry(n_sites=2), 3, seed=0)

    def test_random_matrix_is_seeded(self):
        """Test the same seed gives the same complex rectangular matrix."""
        a = random_matrix(3, 5, seed=2)
        assert a.shape == (3, 5)
        assert np.array_equal(a, random_matrix(3, 5, seed=2))
        assert not np.array_equal(a, random_matrix(3, 5, seed=3))
        assert np.any(a.imag != 0)
        with pytest.raises(DimensionError):
            random_matrix(0, 2, seed=0)

    def test_from_dense_attaches_qubit_geometry(self):
        """Test a 2^n matrix gets a chain and other sizes do not."""
        assert HamiltonianSpec.from_dense(np.diag([0.0, 1.0, 2.0, 3.0])).geometry == LatticeGeometry(n_sites=2)
        assert HamiltonianSpec.from_dense(np.diag([0.0, 1.0, 2.0])).geometry is None


class TestCouplings:
    """Tests for coupling label expansion."""

    def test_star_expands_every_site(self):
        """Test X* puts X on each site."""
        couplings = couplings_from_labels(LatticeGeometry(n_sites=3), ["X*"])
        assert [c.label for c in couplings] == ["X0", "X1", "X2"]

    def test_mixed_labels(self):
        """Test star and explicit labels combine in order."""
        couplings = couplings_from_labels(LatticeGeometry(n_sites=2), ["Z*", "X0 X1"])
        assert [c.label for c in couplings] == ["Z0", "Z1", "X0 X1"]

    def test_default_couplings_qubits(self):
        """Test qubit dimensions default to X on every site."""
        assert [c.label for c in default_couplings(8)] == ["X0", "X1", "X2"]

    def test_default_couplings_non_qubit(self):
        """Test other dimensions get dim - 1 distinct seeded Hermitian couplings."""
        couplings = default_couplings(6, seed=3)
        assert [c.label for c in couplings] == [f"herm(seed={s})" for s in range(3, 8)]
        for coupling in couplings:
            assert coupling.operator.shape == (6, 6)
            assert np.allclose(coupling.operator, coupling.operator.conj().T)
        assert not np.allclose(couplings[0].operator, couplings[1].operator)
        assert np.array_equal(couplings[0].operator, default_couplings(6, seed=3)[0].operator)
