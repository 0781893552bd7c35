"""
Experiment Runner
=================

Runs one configured experiment end to end:

    data -> kernel -> dictionary -> discern -> simulate -> residual
         -> classify -> score -> artifacts

Each stage is tracked in a PipelineState; any failure is re-raised as a
PipelineStageError naming the stage, with the original error chained.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from ..classifier.angle_classifier import AngleTrace, CombinationSearch, Decision, angles, decide
from ..config.experiment_config import ExperimentConfig
from ..data.hankel import check_rank_condition, hankel
from ..data.trajectory_io import load_trajectory
from ..dictionary.fault_dictionary import (
    FaultDictionarySet,
    SignatureSource,
    build_dictionaries,
    build_signatures,
)
from ..discern.discernibility import DiscernibilityReport, intersection_report
from ..errors import DimensionMismatch, PipelineStageError
from ..kernel.kernel_filter import KernelFilter, ResidualTrace, estimate_kernel, nominal_kernel, residual
from ..system.inputs import generate_input
from ..system.models import FaultChannel, StateSpaceModel, TrajectoryData
from ..system.simulator import NoiseSpec, simulate
from .artifacts import write_artifacts, write_summary
from .pipeline_state import PipelineState
from .scoring import ScoreCard, score
from .snr import NoiseScale, innovation_std, snr_to_noise_scale

logger = logging.getLogger(__name__)

STAGES = (
    ("data", "generate or load healthy data"),
    ("kernel", "estimate the kernel filter"),
    ("dictionary", "build fault dictionaries"),
    ("discern", "pairwise discernibility analysis"),
    ("simulate", "simulate the faulty run"),
    ("residual", "compute residuals"),
    ("calibrate", "calibrate the residual threshold"),
    ("classify", "angle classification"),
    ("score", "score decisions"),
    ("artifacts", "write output files"),
)

SEED_PURPOSES = ("healthy_input", "healthy_noise", "validation_noise", "faulty_input", "faulty_noise")


def trial_seeds(master_seed: int, trial: int) -> Dict[str, int]:
    """Independent seed per purpose derived from master_seed + trial"""
    children = np.random.SeedSequence(master_seed + trial).spawn(len(SEED_PURPOSES))
    return {name: int(child.generate_state(1)[0]) for name, child in zip(SEED_PURPOSES, children)}


@dataclass(eq=False)
class HealthyData:
    estimation: TrajectoryData
    validation: TrajectoryData
    model: StateSpaceModel
    noise_scale: Optional[NoiseScale] = None


@dataclass(eq=False)
class RunResult:
    """Everything one run produced"""

    name: str
    trial: int
    seeds: Dict[str, int]
    kernel: KernelFilter
    dictionaries: FaultDictionarySet
    threshold: float
    trajectory: TrajectoryData
    residuals: ResidualTrace
    angle_trace: AngleTrace
    decisions: List[Decision]
    score: ScoreCard
    state: PipelineState
    discernibility: Optional[DiscernibilityReport] = None
    noise_scale: Optional[NoiseScale] = None
    amplitude_scale: float = 1.0
    combinations: Optional[List[Optional[Tuple[FaultChannel, ...]]]] = None
    output_dir: Optional[Path] = None
    artifacts: Dict[str, str] = field(default_factory=dict)

    @property
    def accuracy(self) -> Optional[float]:
        return self.score.accuracy

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "trial": self.trial,
            "seeds": self.seeds,
            "L": self.kernel.L,
            "kernel_source": self.kernel.source,
            "estimated_order": self.kernel.estimated_n,
            "residual_dimension": self.kernel.r,
            "residual_threshold": self.threshold,
            "amplitude_scale": self.amplitude_scale,
            "noise": None if self.noise_scale is None else self.noise_scale.to_dict(),
            "dictionary_ranks": {d.channel.label: d.rank for d in self.dictionaries},
            "indiscernible_pairs": (
                None
                if self.discernibility is None
                else [[c.label for c in r.channels] for r in self.discernibility.indiscernible_pairs()]
            ),
            "score": self.score.to_dict(),
            "pipeline": self.state.to_dict(),
        }


@contextmanager
def _stage(state: PipelineState, name: str) -> Iterator[None]:
    state.start_stage(name)
    logger.info(f"[{state.run_name}#{state.trial}] stage '{name}' started")
    try:
        yield
    except Exception as exc:
        state.fail_stage(name, str(exc))
        state.fail_run(f"stage '{name}'")
        logger.error(f"[{state.run_name}#{state.trial}] stage '{name}' failed: {exc}")
        raise PipelineStageError(name, exc) from exc
    state.complete_stage(name)


def _noisy_model(config: ExperimentConfig, model: StateSpaceModel, u: np.ndarray) -> Tuple[StateSpaceModel, Optional[NoiseScale]]:
    noise = config.noise
    if not noise.enabled:
        return model, None
    if noise.snr_db is not None:
        scale = snr_to_noise_scale(model, u, noise.snr_db)
        return model.with_noise_scale(scale.alpha), scale
    if noise.covariance is not None:
        sigma = np.array(noise.covariance, dtype=float)
        if sigma.shape != (model.n_y, model.n_y):
            raise DimensionMismatch(f"noise covariance has shape {sigma.shape}, expected {(model.n_y, model.n_y)}")
        return (
            StateSpaceModel(model.A, model.B_u, model.C, model.D_u, model.K, sigma, model.name, False),
            None,
        )
    return model, None


def _noise(enabled: bool, seed: int) -> NoiseSpec:
    return NoiseSpec.on(seed) if enabled else NoiseSpec.off()


def prepare_healthy_data(config: ExperimentConfig, model: StateSpaceModel, seeds: Dict[str, int]) -> HealthyData:
    """Healthy estimation data (simulated or loaded) and a fresh validation run"""
    data_cfg = config.data
    spec = data_cfg.healthy_input.build()
    u = generate_input(spec.with_seed(spec.seed + seeds["healthy_input"]), data_cfg.healthy_samples, model.n_u)
    noisy, scale = _noisy_model(config, model, u)
    x0 = None if data_cfg.x0 is None else np.array(data_cfg.x0, dtype=float)

    if data_cfg.healthy_csv:
        estimation = load_trajectory(data_cfg.healthy_csv)
        if (estimation.n_u, estimation.n_y) != (model.n_u, model.n_y):
            raise DimensionMismatch(
                f"{data_cfg.healthy_csv} has (n_u, n_y) = ({estimation.n_u}, {estimation.n_y}), "
                f"model has ({model.n_u}, {model.n_y})"
            )
    else:
        estimation = simulate(noisy, u, noise=_noise(config.noise.enabled, seeds["healthy_noise"]), x0=x0)

    u_val = generate_input(
        spec.with_seed(spec.seed + seeds["healthy_input"] + 1), data_cfg.validation_samples, model.n_u
    )
    validation = simulate(noisy, u_val, noise=_noise(config.noise.enabled, seeds["validation_noise"]))
    return HealthyData(estimation, validation, noisy, scale)


def fit_kernel(config: ExperimentConfig, model: StateSpaceModel, data: TrajectoryData) -> KernelFilter:
    kernel_cfg = config.kernel
    if kernel_cfg.dictionary_source == "nominal":
        return nominal_kernel(model, config.L, kernel_cfg.rel_tol)
    return estimate_kernel(
        data.u,
        data.y,
        config.L,
        rank_policy=kernel_cfg.rank_policy.build(),
        rel_tol=kernel_cfg.rel_tol,
        instrument=kernel_cfg.instrument,
        past_horizon=kernel_cfg.past_horizon,
    )


def fit_dictionaries(config: ExperimentConfig, kernel: KernelFilter) -> FaultDictionarySet:
    signatures = build_signatures(kernel, SignatureSource.DATA_DRIVEN)
    return build_dictionaries(kernel, signatures, config.kernel.rel_tol)


def calibrate_threshold(config: ExperimentConfig, kernel: KernelFilter, validation: TrajectoryData) -> float:
    """
    Explicit threshold if configured, otherwise
    max(factor * percentile of healthy residual norms, floor * max ||[u; y]|| per window)
    """
    thresholds = config.thresholds
    if thresholds.residual is not None:
        return float(thresholds.residual)

    norms = residual(kernel, validation.u, validation.y).norms
    stacked = np.vstack([hankel(validation.u, kernel.L).matrix, hankel(validation.y, kernel.L).matrix])
    scale = float(np.max(np.linalg.norm(stacked, axis=0)))
    calibrated = thresholds.residual_factor * float(np.percentile(norms, thresholds.residual_percentile))
    return max(calibrated, thresholds.residual_floor * scale)


def amplitude_scale(config: ExperimentConfig, model: StateSpaceModel) -> float:
    """Multiplier for scenario amplitudes: 1, or the RMS innovation std of the noisy model"""
    if config.scenario.amplitude_reference == "absolute":
        return 1.0
    std = innovation_std(model) if config.noise.enabled else 0.0
    if std == 0.0:
        logger.warning("amplitude_reference=innovation_std without innovation noise; fault amplitudes left unscaled")
        return 1.0
    return std


def check_excitation(config: ExperimentConfig, estimation: TrajectoryData) -> Optional[Dict[str, Any]]:
    """Rank condition on [X; U_f] for simulated healthy data, None when states are unknown"""
    if estimation.x is None or config.L > estimation.sample_count:
        return None
    u_hankel = hankel(estimation.u, config.L)
    result = check_rank_condition(estimation.x[: u_hankel.depth].T, u_hankel, config.kernel.rel_tol)
    logger.info(f"excitation rank {result['rank']} of {result['required']} required")
    return {"satisfied": bool(result["satisfied"]), "rank": int(result["rank"]), "required": int(result["required"])}


def simulate_faulty(
    config: ExperimentConfig, model: StateSpaceModel, seeds: Dict[str, int], scale: float
) -> TrajectoryData:
    spec = config.data.faulty_input.build()
    u = generate_input(spec.with_seed(spec.seed + seeds["faulty_input"]), config.scenario.samples, model.n_u)
    scenario = config.scenario.build()
    if scale != 1.0:
        scenario = scenario.scaled(scale)
    x0 = None if config.data.x0 is None else np.array(config.data.x0, dtype=float)
    return simulate(model, u, scenario, noise=_noise(config.noise.enabled, seeds["faulty_noise"]), x0=x0)


def run_scenario(
    config: ExperimentConfig,
    trial: int = 0,
    out_dir: Optional[Union[str, Path]] = None,
) -> RunResult:
    """
    Run the full pipeline for one trial

    Args:
        config: validated experiment document
        trial: Monte Carlo trial index; seeds derive from master_seed + trial
        out_dir: where to write artifacts, nothing is written when None

    Raises:
        PipelineStageError: carrying the failing stage name
    """
    state = PipelineState(config.name, trial)
    for name, description in STAGES:
        state.add_stage(name, description)
    state.start_run()
    seeds = trial_seeds(config.monte_carlo.master_seed, trial)

    with _stage(state, "data"):
        model = config.model.build()
        healthy = prepare_healthy_data(config, model, seeds)
        noisy = healthy.model
        excitation = check_excitation(config, healthy.estimation)
        if excitation is not None:
            state.stages["data"].metadata["excitation"] = excitation
            if not excitation["satisfied"]:
                state.warn(
                    f"healthy input is not persistently exciting: rank {excitation['rank']} < {excitation['required']}"
                )

    with _stage(state, "kernel"):
        kernel = fit_kernel(config, noisy, healthy.estimation)
        state.stages["kernel"].metadata.update({"order": kernel.estimated_n, "r": kernel.r})

    with _stage(state, "dictionary"):
        dictionaries = fit_dictionaries(config, kernel)

    report = None
    if config.discern.enabled:
        with _stage(state, "discern"):
            report = intersection_report(
                dictionaries,
                oracle=model if config.discern.use_oracle else None,
                L=config.L,
                rel_tol=config.discern.rel_tol,
                strict=config.discern.strict,
            )
            for record in report.records:
                for note in record.notes:
                    state.warn(note)
    else:
        state.skip_stage("discern", "disabled in config")

    with _stage(state, "simulate"):
        scale = amplitude_scale(config, noisy)
        trajectory = simulate_faulty(config, noisy, seeds, scale)

    with _stage(state, "residual"):
        trace = residual(kernel, trajectory.u, trajectory.y)

    with _stage(state, "calibrate"):
        threshold = calibrate_threshold(config, kernel, healthy.validation)
        logger.info(f"Residual threshold: {threshold:.6g}")

    combos = None
    with _stage(state, "classify"):
        angle_trace = angles(trace, dictionaries)
        decisions = decide(angle_trace, threshold, config.thresholds.tie)
        if config.classifier.combination_search:
            search = CombinationSearch(dictionaries, config.classifier.max_faults, config.thresholds.angle)
            combos = search.search_trace(trace)

    with _stage(state, "score"):
        card = score(decisions, trajectory.active, config.L, dictionaries.channels)

    result = RunResult(
        name=config.name,
        trial=trial,
        seeds=seeds,
        kernel=kernel,
        dictionaries=dictionaries,
        threshold=threshold,
        trajectory=trajectory,
        residuals=trace,
        angle_trace=angle_trace,
        decisions=decisions,
        score=card,
        state=state,
        discernibility=report,
        noise_scale=healthy.noise_scale,
        amplitude_scale=scale,
        combinations=combos,
    )

    if out_dir is not None:
        with _stage(state, "artifacts"):
            result.output_dir = Path(out_dir)
            result.artifacts = write_artifacts(result, result.output_dir)
    else:
        state.skip_stage("artifacts", "no output directory")

    state.complete_run()
    accuracy = card.accuracy
    logger.info(
        f"Run '{config.name}' trial {trial}: accuracy="
        f"{'n/a' if accuracy is None else f'{accuracy:.4f}'} over {card.detected_active} detected fault windows"
    )
    if out_dir is not None:
        write_summary(result, result.output_dir)
    return result
