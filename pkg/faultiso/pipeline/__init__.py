from .artifacts import decisions_table, residuals_frame, write_artifacts, write_summary
from .experiment_runner import (
    RunResult,
    amplitude_scale,
    calibrate_threshold,
    check_excitation,
    fit_dictionaries,
    fit_kernel,
    prepare_healthy_data,
    run_scenario,
    simulate_faulty,
    trial_seeds,
)
from .monte_carlo import MonteCarloSummary, aggregate, monte_carlo, run_trial
from .pipeline_state import PipelineStage, PipelineState, RunStatus, StageStatus
from .scoring import ScoreCard, score, switch_points, transient_mask
from .snr import NoiseScale, innovation_std, output_noise_power, snr_db, snr_to_noise_scale

__all__ = [
    "MonteCarloSummary",
    "NoiseScale",
    "PipelineStage",
    "PipelineState",
    "RunResult",
    "RunStatus",
    "ScoreCard",
    "StageStatus",
    "aggregate",
    "amplitude_scale",
    "calibrate_threshold",
    "check_excitation",
    "decisions_table",
    "fit_dictionaries",
    "fit_kernel",
    "innovation_std",
    "monte_carlo",
    "output_noise_power",
    "prepare_healthy_data",
    "residuals_frame",
    "run_scenario",
    "run_trial",
    "score",
    "simulate_faulty",
    "snr_db",
    "snr_to_noise_scale",
    "switch_points",
    "transient_mask",
    "trial_seeds",
    "write_artifacts",
    "write_summary",
]
