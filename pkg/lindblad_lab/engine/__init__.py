"""Superoperator assembly, propagation and diagnostics."""

from lindblad_lab.engine.dilation import DilationChannel, dilation_choi, dilation_step, evolve_dilation
from lindblad_lab.engine.error_order import ErrorOrderReport, PowerLawFit, channel_error_order, fit_power_law
from lindblad_lab.engine.kms import kms_residual
from lindblad_lab.engine.mixing import MixingReport, mixing_time, probe_states
from lindblad_lab.engine.propagation import EvolutionMethod, EvolutionResult, evolve_expm, evolve_rk4
from lindblad_lab.engine.stationary import StationaryResult, stationary_state
from lindblad_lab.engine.superoperator import SuperOperator, apply, assemble

__all__ = [
    "DilationChannel",
    "ErrorOrderReport",
    "EvolutionMethod",
    "EvolutionResult",
    "MixingReport",
    "PowerLawFit",
    "StationaryResult",
    "SuperOperator",
    "apply",
    "assemble",
    "channel_error_order",
    "dilation_choi",
    "dilation_step",
    "evolve_dilation",
    "evolve_expm",
    "evolve_rk4",
    "fit_power_law",
    "kms_residual",
    "mixing_time",
    "probe_states",
    "stationary_state",
]
