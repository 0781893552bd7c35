"""
faultiso
========

Data-driven fault isolation for linear time-invariant systems: kernel
filters estimated from healthy input/output data, per-channel fault
dictionaries, a subspace-angle classifier and discernibility analysis.
"""

from .config import ExperimentConfig, config_loader
from .errors import FaultIsolationError, PipelineStageError
from .pipeline import monte_carlo, run_scenario

__version__ = "1.0.0"

__all__ = [
    "ExperimentConfig",
    "FaultIsolationError",
    "PipelineStageError",
    "config_loader",
    "monte_carlo",
    "run_scenario",
]
