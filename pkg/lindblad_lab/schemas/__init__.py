"""Pydantic schemas for scenario configs and run manifests."""

from lindblad_lab.schemas.config import (
    ChecksConfig,
    EvolveConfig,
    FilterConfig,
    JumpConfig,
    ModelConfig,
    PauliTermsModelConfig,
    ProbeConfig,
    RandomLocalModelConfig,
    RandomMatrixModelConfig,
    ScenarioConfig,
    TFIMModelConfig,
)
from lindblad_lab.schemas.manifest import FileRecord, RunManifest

__all__ = [
    "ChecksConfig",
    "EvolveConfig",
    "FileRecord",
    "FilterConfig",
    "JumpConfig",
    "ModelConfig",
    "PauliTermsModelConfig",
    "ProbeConfig",
    "RandomLocalModelConfig",
    "RandomMatrixModelConfig",
    "RunManifest",
    "ScenarioConfig",
    "TFIMModelConfig",
]
