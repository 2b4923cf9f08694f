"""Lindbladian generators and jump build reports."""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum

import numpy as np
import numpy.typing as npt

from lindblad_lab.core.exceptions import DimensionError, DomainError, ParameterError
from lindblad_lab.core.tolerances import COHERENT_HERMITIAN_TOL
from lindblad_lab.densemath import ComplexMatrix, as_matrix, hermitian_part, hermiticity_defect, operator_norm


class JumpMethod(StrEnum):
    EIGENBASIS = "eigenbasis"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class WeightedJump:
    """A jump operator ``K`` entering the generator as ``weight * D_K``.

    Attributes:
        operator: ``K`` in the computational basis.
        weight: Nonnegative rate (a quadrature weight for frequency families).
        label: Coupling/frequency tag used in reports.
    """

    operator: ComplexMatrix
    weight: float = 1.0
    label: str = ""

    def __post_init__(self) -> None:
        if not self.weight >= 0.0:
            raise ParameterError("Jump weights must be nonnegative", details={"weight": self.weight, "label": self.label})
        op = np.array(as_matrix(self.operator, square=True), copy=True)
        op.setflags(write=False)
        object.__setattr__(self, "operator", op)

    @property
    def scaled_operator(self) -> ComplexMatrix:
        """``sqrt(weight) K``."""
        return np.sqrt(self.weight) * self.operator


@dataclass(frozen=True)
class LindbladSpec:
    """``L(rho) = -i[G, rho] + sum_j w_j (K_j rho K_j^dag - {K_j^dag K_j, rho}/2)``.

    Attributes:
        coherent: Hermitian coherent term ``G``.
        jumps: Weighted jump operators.
        label: Family name for reports.
    """

    coherent: ComplexMatrix
    jumps: tuple[WeightedJump, ...] = ()
    label: str = "lindbladian"

    def __post_init__(self) -> None:
        g = as_matrix(self.coherent, square=True)
        scale = max(1.0, float(np.max(np.abs(g)))) if g.size else 1.0
        defect = hermiticity_defect(g)
        if defect > COHERENT_HERMITIAN_TOL * scale:
            raise DomainError("Coherent term is not Hermitian", details={"defect": defect})
        g = hermitian_part(g)
        g.setflags(write=False)
        object.__setattr__(self, "coherent", g)
        jumps = tuple(self.jumps)
        for jump in jumps:
            if jump.operator.shape != g.shape:
                raise DimensionError(
                    "Jump operator dimension differs from the coherent term",
                    details={"jump": jump.label, "shape": jump.operator.shape, "dim": g.shape[0]},
                )
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return int(self.coherent.shape[0])

    @classmethod
    def from_operators(
        cls,
        coherent: npt.ArrayLike | None,
        operators: Iterable[npt.ArrayLike],
        *,
        dim: int | None = None,
        label: str = "lindbladian",
    ) -> "LindbladSpec":
        """Unit-weight jumps; ``coherent=None`` means ``G = 0``."""
        ops = [as_matrix(k, square=True) for k in operators]
        if coherent is None:
            size = dim if dim is not None else (ops[0].shape[0] if ops else None)
            if size is None:
                raise DimensionError("Cannot infer the dimension of an empty Lindbladian")
            coherent = np.zeros((size, size), dtype=np.complex128)
        jumps = tuple(WeightedJump(op, 1.0, f"K{i}") for i, op in enumerate(ops))
        return cls(coherent=as_matrix(coherent), jumps=jumps, label=label)

    def with_coherent(self, coherent: npt.ArrayLike) -> "LindbladSpec":
        return replace(self, coherent=as_matrix(coherent))

    def with_jumps(self, jumps: Sequence[WeightedJump]) -> "LindbladSpec":
        return replace(self, jumps=tuple(jumps))

    def scaled(self, factor: float) -> "LindbladSpec":
        """All jump weights multiplied by ``factor``; ``G`` unchanged."""
        return self.with_jumps([replace(j, weight=j.weight * factor) for j in self.jumps])

    def rate_bound(self) -> float:
        """``||G|| + sum_j w_j ||K_j||^2``, the scale that bounds stable step sizes."""
        return operator_norm(self.coherent) + sum(j.weight * operator_norm(j.operator) ** 2 for j in self.jumps)


@dataclass(frozen=True)
class JumpBuildReport:
    """Diagnostics of one jump construction.

    Attributes:
        method: Eigenbasis sum or time quadrature.
        annihilation_residual: ``||K |psi_target>||``.
        truncation: ``(S, M)`` for quadrature builds.
        mismatch_vs_eigenbasis: ``||K_quad - K_eig||`` (spectral norm) for quadrature builds.
        label: Coupling tag.
    """

    method: JumpMethod
    annihilation_residual: float
    truncation: tuple[float, int] | None = None
    mismatch_vs_eigenbasis: float | None = None
    label: str = ""
    extras: dict[str, float] = field(default_factory=dict)
