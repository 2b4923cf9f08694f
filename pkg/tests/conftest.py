"""Test configuration and fixtures.

Logfire is configured once, offline, so spans are created but never exported.
"""

import logfire
import numpy as np
import pytest

from lindblad_lab.jumps.families import amplitude_damping
from lindblad_lab.jumps.types import LindbladSpec
from lindblad_lab.models import HamiltonianSpec, tfim_chain


def pytest_configure(config: pytest.Config) -> None:
    logfire.configure(send_to_logfire=False, console=False)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test-local random data."""
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def tfim2() -> HamiltonianSpec:
    return tfim_chain(2)


@pytest.fixture(scope="session")
def tfim3() -> HamiltonianSpec:
    return tfim_chain(3)


@pytest.fixture
def damping() -> LindbladSpec:
    """Amplitude-damping qubit with unit rate."""
    return amplitude_damping(1.0)
