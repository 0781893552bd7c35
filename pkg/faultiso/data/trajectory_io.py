"""
Trajectory Persistence
======================

One CSV per trajectory with header ``k,u_1..u_nu,y_1..y_ny[,f_channel,f_value]``.
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from ..errors import DimensionMismatch
from ..system.models import FaultChannel, TrajectoryData, all_channels

logger = logging.getLogger(__name__)


def trajectory_frame(data: TrajectoryData) -> pd.DataFrame:
    frame = pd.DataFrame({"k": np.arange(data.sample_count)})
    for j in range(data.n_u):
        frame[f"u_{j + 1}"] = data.u[:, j]
    for j in range(data.n_y):
        frame[f"y_{j + 1}"] = data.y[:, j]

    if data.active is not None:
        columns = {c: i for i, c in enumerate(all_channels(data.n_u, data.n_y))}
        frame["f_channel"] = [c.label if c is not None else "" for c in data.active]
        values = np.zeros(data.sample_count)
        if data.f is not None:
            for k, channel in enumerate(data.active):
                if channel is not None:
                    values[k] = data.f[k, columns[channel]]
        frame["f_value"] = values
    return frame


def save_trajectory(data: TrajectoryData, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(data).to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Wrote {data.sample_count} samples to {path}")
    return path


def load_trajectory(path: Union[str, Path]) -> TrajectoryData:
    """
    Load a trajectory CSV; fault annotations are restored when present

    Raises:
        DimensionMismatch: when the u_/y_ columns are missing or out of order
    """
    frame = pd.read_csv(path, keep_default_na=False, float_precision="round_trip")
    u_cols = _numbered(frame, "u_")
    y_cols = _numbered(frame, "y_")
    if not y_cols:
        raise DimensionMismatch(f"{path} has no y_ columns")

    u = frame[u_cols].to_numpy(dtype=float) if u_cols else np.zeros((len(frame), 0))
    y = frame[y_cols].to_numpy(dtype=float)

    active: Optional[List[Optional[FaultChannel]]] = None
    f = None
    if "f_channel" in frame.columns:
        channels = all_channels(len(u_cols), len(y_cols))
        columns = {c: i for i, c in enumerate(channels)}
        active = [FaultChannel.parse(label) if str(label).strip() else None for label in frame["f_channel"]]
        f = np.zeros((len(frame), len(channels)))
        values = frame["f_value"].to_numpy(dtype=float) if "f_value" in frame.columns else np.zeros(len(frame))
        for k, channel in enumerate(active):
            if channel is not None:
                f[k, columns[channel]] = values[k]

    logger.info(f"Loaded {len(frame)} samples from {path}")
    return TrajectoryData(u=u, y=y, f=f, active=active)


def _numbered(frame: pd.DataFrame, prefix: str) -> List[str]:
    names = [c for c in frame.columns if c.startswith(prefix)]
    expected = [f"{prefix}{i}" for i in range(1, len(names) + 1)]
    if names != expected:
        raise DimensionMismatch(f"columns {names} do not follow {prefix}1..{prefix}{len(names)}")
    return names
