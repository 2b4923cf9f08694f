"""Tests for shell decompositions and decay fits."""

import math

import numpy as np
import pytest

from lindblad_lab.core.exceptions import FitError, ParameterError
from lindblad_lab.models import HamiltonianSpec, LatticeGeometry, PauliString, pauli_site_operator, tfim_chain
from lindblad_lab.quasilocality import (
    ShellDecomposition,
    decay_fit,
    embed,
    jump_shells,
    project_to_ball,
    shell_decompose,
)

Z = np.diag([1.0, -1.0]).astype(complex)


class TestProjection:
    """Tests for embedding and ball projections."""

    def test_embed_single_site(self):
        """Test embedding matches the site operator."""
        geometry = LatticeGeometry(n_sites=3)
        assert np.allclose(embed(Z, (1,), geometry), pauli_site_operator(geometry, 1, "Z"))

    def test_embed_non_adjacent_sites(self):
        """Test embedding on sites (0, 2) matches the Pauli string."""
        geometry = LatticeGeometry(n_sites=3)
        expected = PauliString.from_label("Z0 Z2").to_dense(geometry)
        assert np.allclose(embed(np.kron(Z, Z), (0, 2), geometry), expected)

    def test_projection_keeps_local_operator(self):
        """Test an operator inside the ball is unchanged."""
        geometry = LatticeGeometry(n_sites=4)
        op = pauli_site_operator(geometry, 1, "X")
        assert np.allclose(project_to_ball(op, geometry, 1, 0), op)

    def test_projection_removes_traceless_outside(self):
        """Test a traceless operator outside the ball projects to zero."""
        geometry = LatticeGeometry(n_sites=4)
        op = pauli_site_operator(geometry, 3, "Z")
        assert np.allclose(project_to_ball(op, geometry, 0, 1), 0.0)

    def test_negative_radius(self):
        """Test radii must be nonnegative."""
        with pytest.raises(ParameterError):
            project_to_ball(np.eye(4), LatticeGeometry(n_sites=2), 0, -1)


class TestShells:
    """Tests for shell decomposition."""

    def test_string_lands_in_its_shell(self):
        """Test Z0 Z2 around site 0 lives entirely in shell 2."""
        geometry = LatticeGeometry(n_sites=3)
        op = PauliString.from_label("Z0 Z2").to_dense(geometry)
        dec = shell_decompose(op, geometry, 0)
        assert dec.radii == (0, 1, 2)
        assert np.allclose(dec.norms, [0.0, 0.0, 1.0], atol=1e-14)
        assert dec.reconstruction_error < 1e-14
        assert dec.nonzero_count() == 1

    def test_identity_lands_in_shell_zero(self):
        """Test the identity is entirely local."""
        geometry = LatticeGeometry(n_sites=3)
        dec = shell_decompose(np.eye(8), geometry, 1)
        assert dec.norms[0] == pytest.approx(1.0)
        assert np.allclose(dec.norms[1:], 0.0, atol=1e-14)


class TestDecayFit:
    """Tests for the exponential fit."""

    def test_recovers_rate(self):
        """Test an exact exponential gives its rate and constant."""
        norms = 2.0 * np.exp(-0.7 * np.arange(5))
        dec = ShellDecomposition(site=0, radii=tuple(range(5)), shells=(), norms=norms, reconstruction_error=0.0)
        fit = decay_fit(dec)
        assert fit.mu_decay == pytest.approx(0.7)
        assert fit.constant == pytest.approx(2.0)
        assert fit.residual < 1e-12
        assert fit.predict(3) == pytest.approx(2.0 * math.exp(-2.1))

    def test_too_few_shells(self):
        """Test fewer than three shells above the floor raise FitError."""
        dec = ShellDecomposition(
            site=0, radii=(0, 1, 2), shells=(), norms=np.array([1.0, 0.1, 0.0]), reconstruction_error=0.0
        )
        with pytest.raises(FitError):
            decay_fit(dec)


class TestJumpShells:
    """Tests for shells of ground-state jumps."""

    def test_gapped_chain(self):
        """Test shells reconstruct the jump and the local part dominates."""
        h = tfim_chain(5, g=2.0)
        dec = jump_shells(h)
        assert dec.site == 2
        assert len(dec.radii) == 3
        assert dec.reconstruction_error < 1e-10
        assert dec.norms[0] == pytest.approx(np.max(dec.norms))

    def test_needs_geometry(self):
        """Test a dense matrix without a lattice is refused."""
        with pytest.raises(ParameterError):
            jump_shells(HamiltonianSpec.from_dense(np.diag([0.0, 1.0, 2.0])))

    @pytest.mark.slow
    def test_eight_site_decay(self):
        """Test the eight-site jump decays across at least four shells."""
        dec = jump_shells(tfim_chain(8, g=2.0))
        fit = decay_fit(dec)
        assert dec.nonzero_count() >= 4
        assert fit.mu_decay > 0
