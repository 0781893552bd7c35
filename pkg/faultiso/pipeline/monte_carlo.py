"""
Monte Carlo Harness
===================

Repeats run_scenario over trials 0..N-1 (seed master_seed + trial) and
aggregates accuracies and confusion counts. Trials run in worker processes
when monte_carlo.workers > 1; results are merged by trial index.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from ..config.experiment_config import ExperimentConfig
from .artifacts import write_json
from .experiment_runner import run_scenario
from .scoring import ACCURACY_DEFINITION

logger = logging.getLogger(__name__)

ACCURACY_KEYS = ("accuracy", "accuracy_all_active", "accuracy_steady", "accuracy_transient", "false_alarm_rate")
COUNT_KEYS = (
    "evaluated",
    "fault_active",
    "detected_active",
    "correct_detected",
    "ambiguous",
    "ambiguous_containing_truth",
    "false_alarms",
)


def run_trial(config: ExperimentConfig, trial: int) -> Dict[str, Any]:
    """One trial reduced to a flat record"""
    result = run_scenario(config, trial)
    record = {"trial": trial, "estimated_order": result.kernel.estimated_n, "threshold": result.threshold}
    record.update(result.score.to_dict())
    record.pop("definition")
    return record


def _run_trial_payload(payload: Dict[str, Any], trial: int) -> Dict[str, Any]:
    return run_trial(ExperimentConfig.model_validate(payload), trial)


def _statistics(values: List[Optional[float]]) -> Dict[str, Any]:
    present = np.array([v for v in values if v is not None], dtype=float)
    if present.size == 0:
        return {"mean": None, "std": None, "min": None, "max": None, "trials": 0}
    return {
        "mean": float(np.mean(present)),
        "std": float(np.std(present)),
        "min": float(np.min(present)),
        "max": float(np.max(present)),
        "trials": int(present.size),
    }


@dataclass
class MonteCarloSummary:
    name: str
    trials: int
    master_seed: int
    records: List[Dict[str, Any]]
    statistics: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    confusion: Dict[str, Dict[str, int]] = field(default_factory=dict)
    totals: Dict[str, int] = field(default_factory=dict)

    @property
    def mean_accuracy(self) -> Optional[float]:
        return self.statistics["accuracy"]["mean"]

    @property
    def std_accuracy(self) -> Optional[float]:
        return self.statistics["accuracy"]["std"]

    def trials_frame(self) -> pd.DataFrame:
        columns = ["trial", "estimated_order", "threshold", *ACCURACY_KEYS, *COUNT_KEYS]
        return pd.DataFrame([{c: r.get(c) for c in columns} for r in self.records], columns=columns)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "seed_rule": "trial seed = master_seed + trial index",
            "statistics": self.statistics,
            "totals": self.totals,
            "confusion": self.confusion,
            "definition": ACCURACY_DEFINITION,
        }


def aggregate(config: ExperimentConfig, records: List[Dict[str, Any]]) -> MonteCarloSummary:
    records = sorted(records, key=lambda r: r["trial"])
    statistics = {key: _statistics([r[key] for r in records]) for key in ACCURACY_KEYS}

    confusion: Dict[str, Dict[str, int]] = {}
    for record in records:
        for truth, row in record["confusion"].items():
            target = confusion.setdefault(truth, {})
            for predicted, count in row.items():
                target[predicted] = target.get(predicted, 0) + int(count)

    totals = {key: int(sum(r[key] for r in records)) for key in COUNT_KEYS}
    return MonteCarloSummary(
        name=config.name,
        trials=len(records),
        master_seed=config.monte_carlo.master_seed,
        records=records,
        statistics=statistics,
        confusion=confusion,
        totals=totals,
    )


def monte_carlo(
    config: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    trials: Optional[int] = None,
    workers: Optional[int] = None,
) -> MonteCarloSummary:
    """
    Run and aggregate config.monte_carlo.trials trials

    Writes trials.csv and montecarlo.json into out_dir when given.
    """
    trials = trials or config.monte_carlo.trials
    workers = workers or config.monte_carlo.workers
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    logger.info(f"Monte Carlo '{config.name}': {trials} trials, {workers} worker(s), master seed {config.monte_carlo.master_seed}")
    if workers > 1 and trials > 1:
        payload = config.model_dump(mode="json")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(_run_trial_payload, [payload] * trials, range(trials)))
    else:
        records = []
        for trial in range(trials):
            records.append(run_trial(config, trial))
            logger.debug(f"Trial {trial}: accuracy={records[-1]['accuracy']}")

    summary = aggregate(config, records)
    mean, std = summary.mean_accuracy, summary.std_accuracy
    logger.info(
        f"Monte Carlo '{config.name}': mean accuracy "
        f"{'n/a' if mean is None else f'{mean:.4f} +/- {std:.4f}'} over {summary.trials} trials"
    )

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        summary.trials_frame().to_csv(out_dir / "trials.csv", index=False, float_format="%.17g")
        write_json(summary.to_dict(), out_dir / "montecarlo.json")
        logger.info(f"Monte Carlo results written to {out_dir}")
    return summary
