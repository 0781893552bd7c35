"""
Run Artifacts
=============

Output layout of one run:

    filter.json, dictionaries.json, trajectory.csv, residuals.csv,
    angles.csv, decisions.csv, discernibility.json, summary.json

CSV files are tidy tables written with full float precision so that two
runs with the same seed produce identical bytes.
"""

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Dict

import numpy as np
import pandas as pd

from ..classifier.angle_classifier import decisions_frame
from ..data.trajectory_io import save_trajectory
from ..dictionary.fault_dictionary import save_dictionaries
from ..kernel.kernel_filter import ResidualTrace, save_filter
from .scoring import transient_mask

if TYPE_CHECKING:
    from .experiment_runner import RunResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def residuals_frame(trace: ResidualTrace) -> pd.DataFrame:
    frame = pd.DataFrame({"k": trace.times})
    for j in range(trace.dim):
        frame[f"r_{j + 1}"] = trace.values[:, j]
    frame["norm"] = trace.norms
    return frame


def decisions_table(result: "RunResult") -> pd.DataFrame:
    """decisions_frame plus ground truth, transient flag and combination search hits"""
    frame = decisions_frame(result.angle_trace, result.decisions)
    count = len(result.decisions)
    active = result.trajectory.active or [None] * result.trajectory.sample_count
    frame["truth"] = [c.label if c is not None else "healthy" for c in active[:count]]
    frame["transient"] = transient_mask(active, result.kernel.L, count)
    if result.combinations is not None:
        frame["combination"] = [
            "" if combo is None else "+".join(c.label for c in combo) for combo in result.combinations
        ]
    return frame


def write_artifacts(result: "RunResult", out_dir: Path) -> Dict[str, str]:
    """Write every per-run file except summary.json; returns name -> path"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {
        "filter": save_filter(result.kernel, out_dir / "filter.json", result.threshold),
        "dictionaries": save_dictionaries(result.dictionaries, out_dir / "dictionaries.json"),
        "trajectory": save_trajectory(result.trajectory, out_dir / "trajectory.csv"),
    }

    tables = {
        "residuals": residuals_frame(result.residuals),
        "angles": result.angle_trace.to_frame(),
        "decisions": decisions_table(result),
    }
    for name, frame in tables.items():
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        written[name] = path

    if result.discernibility is not None:
        written["discernibility"] = result.discernibility.save(out_dir / "discernibility.json")

    logger.info(f"Wrote {len(written)} artifacts to {out_dir}")
    return {name: str(path) for name, path in written.items()}


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def write_json(document, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, default=_json_default)
    return path


def write_summary(result: "RunResult", out_dir: Path) -> Path:
    document = result.summary()
    document["artifacts"] = result.artifacts
    return write_json(document, Path(out_dir) / "summary.json")
