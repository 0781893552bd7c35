from .benchmarks import BENCHMARK_ZERO, benchmark_model, random_state_space
from .constructions import (
    ChannelSet,
    ChannelSetKind,
    block_toeplitz,
    extended_observability,
    fault_subsystem,
    markov_parameters,
    observability_matrix,
    stacked_fault_map,
    subsystem_observability,
    subsystem_toeplitz,
    toeplitz,
)
from .inputs import InputKind, InputSpec, generate_input
from .models import (
    ChannelKind,
    FaultChannel,
    FaultSubsystem,
    StateSpaceModel,
    TrajectoryData,
    all_channels,
    normalize_output_subset,
)
from .scenarios import FaultScenario, FaultSegment, FaultSignal, SignalKind
from .simulator import NoiseSpec, draw_innovations, noise_factor, simulate

__all__ = [
    "BENCHMARK_ZERO",
    "ChannelKind",
    "ChannelSet",
    "ChannelSetKind",
    "FaultChannel",
    "FaultScenario",
    "FaultSegment",
    "FaultSignal",
    "FaultSubsystem",
    "InputKind",
    "InputSpec",
    "NoiseSpec",
    "SignalKind",
    "StateSpaceModel",
    "TrajectoryData",
    "all_channels",
    "benchmark_model",
    "block_toeplitz",
    "draw_innovations",
    "extended_observability",
    "fault_subsystem",
    "generate_input",
    "markov_parameters",
    "noise_factor",
    "normalize_output_subset",
    "observability_matrix",
    "random_state_space",
    "simulate",
    "stacked_fault_map",
    "subsystem_observability",
    "subsystem_toeplitz",
    "toeplitz",
]
