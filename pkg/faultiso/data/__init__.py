from .hankel import HankelStack, WindowVector, check_rank_condition, hankel, window
from .trajectory_io import load_trajectory, save_trajectory, trajectory_frame

__all__ = [
    "HankelStack",
    "WindowVector",
    "check_rank_condition",
    "hankel",
    "load_trajectory",
    "save_trajectory",
    "trajectory_frame",
    "window",
]
