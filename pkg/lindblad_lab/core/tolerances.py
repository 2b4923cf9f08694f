"""Global numerical tolerances and dimension guards."""

from typing import Final

HERMITIAN_TOL: Final = 1e-12
TRACE_TOL: Final = 1e-12
PSD_FLOOR: Final = -1e-10
EIGH_INPUT_TOL: Final = 1e-10
COHERENT_HERMITIAN_TOL: Final = 1e-10

# relative to max(1, spectral scale)
DEGENERACY_TOL: Final = 1e-10

NULL_EIGENVALUE_TOL: Final = 1e-8
TRACE_DRIFT_ABORT: Final = 1e-8
BISECTION_RTOL: Final = 1e-3
SHELL_NOISE_FLOOR: Final = 1e-13

MAX_KRON_ENTRIES: Final = 2**26
MAX_QUBITS: Final = 10
MAX_SUPEROPERATOR_DIM: Final = 64
