"""Scenario configuration documents.

A config is a single JSON object. Unknown keys are rejected at every level,
and the validated model (defaults included) is echoed into the run manifest,
so the manifest alone determines a rerun.
"""

from typing import Annotated, Literal, Self

from pydantic import Field, field_validator, model_validator

from lindblad_lab.core.tolerances import MAX_QUBITS
from lindblad_lab.engine.error_order import DEFAULT_DT_LIST, DEFAULT_T_TOTAL
from lindblad_lab.engine.propagation import EvolutionMethod
from lindblad_lab.jumps.gibbs import TransitionRule
from lindblad_lab.jumps.types import JumpMethod
from lindblad_lab.schemas.base import BaseSchema

ScenarioName = Literal[
    "prepare-ground",
    "prepare-gibbs",
    "prepare-excited",
    "prepare-singular",
    "prepare-nonnormal",
    "mixing-scan",
    "quasilocality",
    "error-order",
]

JumpFamily = Literal[
    "ground",
    "gibbs_single",
    "gibbs_family",
    "excited_squared",
    "excited_projected",
    "singular",
    "nonnormal",
    "amplitude_damping",
]

# first entry is the default family of the scenario
SCENARIO_FAMILIES: dict[str, tuple[str, ...]] = {
    "prepare-ground": ("ground",),
    "prepare-gibbs": ("gibbs_single", "gibbs_family"),
    "prepare-excited": ("excited_projected", "excited_squared"),
    "prepare-singular": ("singular",),
    "prepare-nonnormal": ("nonnormal",),
    "mixing-scan": ("ground",),
    "quasilocality": ("ground",),
    "error-order": ("amplitude_damping", "ground"),
}

MATRIX_SCENARIOS = frozenset({"prepare-singular", "prepare-nonnormal"})


# === Models ===


class TFIMModelConfig(BaseSchema):
    """Open transverse-field Ising chain."""

    kind: Literal["tfim"] = "tfim"
    n: int = Field(default=3, ge=1, le=MAX_QUBITS)
    g: float = 1.0
    J: float = 1.0


class PauliTermsModelConfig(BaseSchema):
    """Explicit Pauli-string Hamiltonian such as ``[[-1.0, "X0 X1"], [0.5, "Z2"]]``."""

    kind: Literal["pauli_terms"] = "pauli_terms"
    n: int = Field(ge=1, le=MAX_QUBITS)
    terms: list[tuple[float, str]] = Field(min_length=1)


class RandomLocalModelConfig(BaseSchema):
    """Seeded random ``k``-local chain Hamiltonian."""

    kind: Literal["random_local"] = "random_local"
    n: int = Field(default=3, ge=1, le=MAX_QUBITS)
    k: int = Field(default=2, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _check_locality(self) -> Self:
        if self.k > self.n:
            raise ValueError("k must not exceed n")
        return self


class RandomMatrixModelConfig(BaseSchema):
    """Seeded complex Gaussian square matrix (singular-vector and eigenvector targets)."""

    kind: Literal["random_matrix"] = "random_matrix"
    dim: int = Field(default=8, ge=2, le=64)
    seed: int = 7


ModelConfig = Annotated[
    TFIMModelConfig | PauliTermsModelConfig | RandomLocalModelConfig | RandomMatrixModelConfig,
    Field(discriminator="kind"),
]


# === Filter, jumps, evolution ===


class FilterConfig(BaseSchema):
    """Overrides for the ground-type filter; unset values come from the model hints."""

    delta: float | None = Field(default=None, gt=0)
    e_max: float | None = Field(default=None, gt=0)
    n_nodes: int | None = Field(default=None, ge=3)


class JumpConfig(BaseSchema):
    """Jump family and its parameters.

    ``couplings`` takes labels such as ``"X*"`` (that letter on every site)
    or Pauli strings like ``"Z1"``; unset means the family's default set.
    """

    family: JumpFamily | None = None
    couplings: list[str] | None = Field(default=None, min_length=1)
    coupling_seed: int = 0
    method: JumpMethod = JumpMethod.EIGENBASIS
    beta: float = Field(default=1.0, ge=0)
    sigma: float | None = Field(default=None, gt=0)
    rule: TransitionRule = TransitionRule.METROPOLIS
    compensate_width: bool = True
    mu: float | None = None
    delta: float | None = Field(default=None, gt=0)
    gamma: float = Field(default=1.0, gt=0)
    lambda_center: tuple[float, float] | None = None
    lambda_radius: float = Field(default=0.05, ge=0)
    lambda_points: int = Field(default=5, ge=1)


class EvolveConfig(BaseSchema):
    """Trajectory recording.

    ``t_max`` unset means ``30 / gap`` of the assembled superoperator.
    ``dt`` is the RK4 step and ``channel_dt`` the dilation step.
    """

    method: EvolutionMethod = EvolutionMethod.EXPM
    t_max: float | None = Field(default=None, gt=0)
    dt: float = Field(default=0.01, gt=0)
    channel_dt: float = Field(default=0.01, gt=0)
    points: int = Field(default=51, ge=2)


class ProbeConfig(BaseSchema):
    eta: float = Field(default=0.01, gt=0, le=2)
    random: int = Field(default=1, ge=0)
    seed: int = 0

    @property
    def seeds(self) -> tuple[int, ...]:
        return tuple(range(self.seed, self.seed + self.random))


class ChecksConfig(BaseSchema):
    fixed_point_tol: float = Field(default=1e-9, gt=0)


# === Top level ===


class ScenarioConfig(BaseSchema):
    """A complete, self-contained run description."""

    scenario: ScenarioName
    seed: int = 0
    model: ModelConfig = Field(default_factory=TFIMModelConfig)
    filter: FilterConfig = Field(default_factory=FilterConfig)
    jump: JumpConfig = Field(default_factory=JumpConfig)
    evolve: EvolveConfig = Field(default_factory=EvolveConfig)
    probes: ProbeConfig = Field(default_factory=ProbeConfig)
    checks: ChecksConfig = Field(default_factory=ChecksConfig)
    n_list: list[int] = Field(default_factory=lambda: [2, 3, 4, 5], min_length=1)
    dt_list: list[float] = Field(default_factory=lambda: list(DEFAULT_DT_LIST), min_length=4)
    t_total: float = Field(default=DEFAULT_T_TOTAL, gt=0)
    output: str | None = None

    @field_validator("n_list")
    @classmethod
    def _check_n_list(cls, values: list[int]) -> list[int]:
        if any(n < 1 or n > MAX_QUBITS for n in values):
            raise ValueError(f"every n must lie in [1, {MAX_QUBITS}]")
        if len(set(values)) != len(values):
            raise ValueError("n_list entries must be distinct")
        return sorted(values)

    @field_validator("dt_list")
    @classmethod
    def _check_dt_list(cls, values: list[float]) -> list[float]:
        if any(dt <= 0 for dt in values):
            raise ValueError("every dt must be positive")
        return sorted(values, reverse=True)

    @model_validator(mode="after")
    def _resolve_family(self) -> Self:
        allowed = SCENARIO_FAMILIES[self.scenario]
        if self.jump.family is None:
            self.jump.family = allowed[0]  # type: ignore[assignment]
        elif self.jump.family not in allowed:
            raise ValueError(f"scenario {self.scenario} accepts jump families {list(allowed)}")

        is_matrix = isinstance(self.model, RandomMatrixModelConfig)
        if self.scenario in MATRIX_SCENARIOS and not is_matrix:
            if "model" in self.model_fields_set:
                raise ValueError(f"scenario {self.scenario} needs a random_matrix model")
            self.model = RandomMatrixModelConfig(dim=6 if self.scenario == "prepare-nonnormal" else 8)
        elif self.scenario not in MATRIX_SCENARIOS and is_matrix:
            raise ValueError(f"scenario {self.scenario} needs a lattice model, not random_matrix")
        if self.scenario == "mixing-scan" and isinstance(self.model, PauliTermsModelConfig):
            raise ValueError("mixing-scan rescales n, so it needs a tfim or random_local model")
        if self.scenario == "quasilocality" and self.jump.couplings is not None and len(self.jump.couplings) != 1:
            raise ValueError("quasilocality takes a single coupling label such as \"X4\"")
        if self.jump.family == "excited_squared" and self.jump.mu is None:
            raise ValueError("excited_squared needs jump.mu")
        return self
