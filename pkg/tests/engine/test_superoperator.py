"""Tests for superoperator assembly and stationary states."""

import math

import numpy as np
import pytest

from lindblad_lab.core.exceptions import DimensionError, NoFixedPointError
from lindblad_lab.densemath import DensityMatrix, trace_distance
from lindblad_lab.engine.stationary import stationary_state
from lindblad_lab.engine.superoperator import SuperOperator, apply, assemble
from lindblad_lab.jumps.families import ground_state_lindbladian
from lindblad_lab.jumps.types import LindbladSpec
from lindblad_lab.models import random_matrix


class TestAssemble:
    """Tests for the vectorized generator."""

    def test_matches_matrix_free_action(self, tfim2):
        """Test mat @ vec(X) equals vec(L(X)) for a generic X."""
        spec = ground_state_lindbladian(tfim2).spec
        x = random_matrix(4, 4, seed=3)
        assert np.allclose(assemble(spec).act(x), apply(spec, x), atol=1e-12)

    def test_trace_preserving(self, tfim2):
        """Test vec(I)^dag L = 0."""
        superop = assemble(ground_state_lindbladian(tfim2).spec)
        assert superop.trace_defect() < 1e-12

    def test_damping_spectrum(self, damping):
        """Test amplitude damping has eigenvalues 0, -1 and a -1/2 pair."""
        values = np.sort(assemble(damping).eigenvalues().real)
        assert np.allclose(values, [-1.0, -0.5, -0.5, 0.0], atol=1e-12)

    def test_weight_folded_in(self, damping):
        """Test doubling the weight doubles the generator when G = 0."""
        assert np.allclose(assemble(damping.scaled(2.0)).mat, 2.0 * assemble(damping).mat)

    def test_dimension_guard(self):
        """Test systems above the dense cap are refused."""
        with pytest.raises(DimensionError):
            assemble(LindbladSpec(coherent=np.zeros((65, 65))))

    def test_apply_checks_state_dimension(self, damping):
        """Test a state of the wrong size is refused."""
        with pytest.raises(DimensionError):
            apply(damping, DensityMatrix.maximally_mixed(3))


class TestStationaryState:
    """Tests for fixed points and the spectral gap."""

    def test_damping_fixed_point(self, damping):
        """Test the fixed point is |0><0| with gap 1/2."""
        result = stationary_state(damping)
        assert result.unique
        assert result.null_dim == 1
        assert result.gap == pytest.approx(0.5)
        assert trace_distance(result.state, DensityMatrix.basis_state(2, 0)) < 1e-10

    def test_ground_family_fixed_point(self, tfim3):
        """Test the ground family prepares the ground state."""
        build = ground_state_lindbladian(tfim3)
        result = stationary_state(build.spec)
        assert result.unique
        assert result.gap > 0
        assert trace_distance(result.state, build.target) < 1e-8

    def test_degenerate_null_space(self):
        """Test G = 0 without jumps has every state fixed."""
        result = stationary_state(LindbladSpec(coherent=np.zeros((2, 2))))
        assert not result.unique
        assert result.null_dim == 4
        assert math.isinf(result.gap)

    def test_no_fixed_point(self):
        """Test a generator without a zero eigenvalue raises."""
        with pytest.raises(NoFixedPointError):
            stationary_state(SuperOperator(dim=2, mat=-np.eye(4, dtype=complex)))
