from .config_loader import BUILTIN_CONFIGS, ConfigLoader, config_loader
from .experiment_config import (
    ClassifierConfig,
    DataConfig,
    DiscernConfig,
    ExperimentConfig,
    InputConfig,
    KernelConfig,
    ModelConfig,
    MonteCarloConfig,
    NoiseConfig,
    RankPolicyConfig,
    ScenarioConfig,
    SegmentConfig,
    SignalConfig,
    ThresholdConfig,
)

__all__ = [
    "BUILTIN_CONFIGS",
    "ClassifierConfig",
    "ConfigLoader",
    "DataConfig",
    "DiscernConfig",
    "ExperimentConfig",
    "InputConfig",
    "KernelConfig",
    "ModelConfig",
    "MonteCarloConfig",
    "NoiseConfig",
    "RankPolicyConfig",
    "ScenarioConfig",
    "SegmentConfig",
    "SignalConfig",
    "ThresholdConfig",
    "config_loader",
]
