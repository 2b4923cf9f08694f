"""Jump-operator families for ground, thermal, excited and singular-vector targets."""

from lindblad_lab.jumps.excited import excited_jump_projected, excited_jump_squared
from lindblad_lab.jumps.families import (
    FamilyBuild,
    amplitude_damping,
    excited_projected_lindbladian,
    excited_squared_lindbladian,
    gibbs_family_lindbladian,
    ground_state_lindbladian,
    thermal_lindbladian,
)
from lindblad_lab.jumps.gibbs import (
    CoherentSolution,
    TransitionRule,
    default_omega_grid,
    gibbs_jump_family,
    gibbs_jump_single,
    solve_coherent_term,
)
from lindblad_lab.jumps.ground import ground_jump_eigenbasis, ground_jump_quadrature
from lindblad_lab.jumps.singular import (
    NonnormalSearchResult,
    complex_grid,
    nonnormal_eigvec_search,
    singular_jump,
    singular_lindbladian,
)
from lindblad_lab.jumps.types import JumpBuildReport, JumpMethod, LindbladSpec, WeightedJump

__all__ = [
    "CoherentSolution",
    "FamilyBuild",
    "JumpBuildReport",
    "JumpMethod",
    "LindbladSpec",
    "NonnormalSearchResult",
    "TransitionRule",
    "WeightedJump",
    "amplitude_damping",
    "complex_grid",
    "default_omega_grid",
    "excited_jump_projected",
    "excited_jump_squared",
    "excited_projected_lindbladian",
    "excited_squared_lindbladian",
    "gibbs_family_lindbladian",
    "gibbs_jump_family",
    "gibbs_jump_single",
    "ground_jump_eigenbasis",
    "ground_jump_quadrature",
    "ground_state_lindbladian",
    "nonnormal_eigvec_search",
    "singular_jump",
    "singular_lindbladian",
    "solve_coherent_term",
    "thermal_lindbladian",
]
