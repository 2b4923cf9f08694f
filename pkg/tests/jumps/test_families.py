"""Tests for Lindbladian containers and one-call family assemblers."""

import math

import numpy as np
import pytest

from lindblad_lab.core.exceptions import DimensionError, DomainError, ParameterError
from lindblad_lab.densemath import DensityMatrix, trace_norm
from lindblad_lab.engine.superoperator import apply
from lindblad_lab.jumps.families import (
    amplitude_damping,
    gibbs_family_lindbladian,
    ground_state_lindbladian,
    thermal_lindbladian,
)
from lindblad_lab.jumps.types import JumpMethod, LindbladSpec, WeightedJump
from lindblad_lab.models import couplings_from_labels


class TestLindbladSpec:
    """Tests for the generator container."""

    def test_negative_weight_rejected(self):
        """Test jump weights must be nonnegative."""
        with pytest.raises(ParameterError):
            WeightedJump(np.eye(2), -1.0)

    def test_non_hermitian_coherent_rejected(self):
        """Test G must be Hermitian."""
        with pytest.raises(DomainError):
            LindbladSpec(coherent=np.array([[0, 1], [0, 0]], dtype=complex))

    def test_jump_dimension_checked(self):
        """Test jumps must match the coherent term."""
        with pytest.raises(DimensionError):
            LindbladSpec(coherent=np.zeros((2, 2)), jumps=(WeightedJump(np.eye(3)),))

    def test_from_operators_infers_dimension(self):
        """Test G defaults to zero of the jump dimension."""
        spec = LindbladSpec.from_operators(None, [np.eye(3)])
        assert spec.dim == 3
        assert np.all(spec.coherent == 0)
        assert spec.jumps[0].label == "K0"

    def test_scaled_keeps_coherent(self, damping):
        """Test scaling multiplies weights only."""
        scaled = damping.scaled(3.0)
        assert scaled.jumps[0].weight == pytest.approx(3.0)
        assert np.array_equal(scaled.coherent, damping.coherent)

    def test_rate_bound(self, damping):
        """Test ||G|| + sum w ||K||^2 for amplitude damping."""
        assert damping.rate_bound() == pytest.approx(1.0)


class TestGroundStateLindbladian:
    """Tests for the ground-state family."""

    def test_ground_state_is_fixed(self, tfim3):
        """Test the ground state is stationary with G = H."""
        build = ground_state_lindbladian(tfim3)
        assert len(build.spec.jumps) == 3
        assert np.array_equal(build.spec.coherent, tfim3.dense)
        assert build.max_annihilation_residual < 1e-12
        assert trace_norm(apply(build.spec, build.target)) < 1e-10

    def test_quadrature_method_reports_mismatch(self, tfim2):
        """Test quadrature builds record truncation and stay close to the exact jumps."""
        couplings = couplings_from_labels(tfim2.geometry, ["X*", "Z0"])
        build = ground_state_lindbladian(tfim2, couplings, method=JumpMethod.QUADRATURE)
        assert [r.label for r in build.reports] == ["X0", "X1", "Z0"]
        assert all(r.method is JumpMethod.QUADRATURE for r in build.reports)
        assert max(r.mismatch_vs_eigenbasis for r in build.reports) <= 1e-6
        assert build.max_annihilation_residual <= 1e-6


class TestThermalDefaults:
    """Tests for the temperature-matched filter width."""

    def test_single_jump_default_width(self, tfim2):
        """Test the single-jump family defaults to sigma = sqrt(2 / beta)."""
        default = thermal_lindbladian(tfim2, 1.0)
        explicit = thermal_lindbladian(tfim2, 1.0, sigma=math.sqrt(2.0))
        narrow = thermal_lindbladian(tfim2, 1.0, sigma=1.0)
        for a, b, c in zip(default.spec.jumps, explicit.spec.jumps, narrow.spec.jumps, strict=True):
            assert np.allclose(a.operator, b.operator, atol=1e-14)
            assert not np.allclose(a.operator, c.operator)

    def test_family_default_width(self, tfim2):
        """Test the multi-frequency family defaults to sigma = sqrt(2 / beta) at beta = 2."""
        default = gibbs_family_lindbladian(tfim2, 2.0, solve_coherent=False)
        explicit = gibbs_family_lindbladian(tfim2, 2.0, sigma=1.0, solve_coherent=False)
        assert len(default.spec.jumps) == len(explicit.spec.jumps)
        for a, b in zip(default.spec.jumps, explicit.spec.jumps, strict=True):
            assert np.allclose(a.operator, b.operator, atol=1e-14)
            assert a.weight == pytest.approx(b.weight)


class TestAmplitudeDamping:
    """Tests for the qubit decay reference model."""

    def test_structure(self, damping):
        """Test one lowering jump and G = 0."""
        assert damping.dim == 2
        assert np.all(damping.coherent == 0)
        assert np.allclose(damping.jumps[0].operator, [[0, 1], [0, 0]])

    def test_fixed_point_is_ground(self, damping):
        """Test |0><0| is stationary and |1><1| is not."""
        assert trace_norm(apply(damping, DensityMatrix.basis_state(2, 0))) == 0.0
        assert trace_norm(apply(damping, DensityMatrix.basis_state(2, 1))) == pytest.approx(2.0)
