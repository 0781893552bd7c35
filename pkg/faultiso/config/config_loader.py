"""
Configuration Loader
====================

Loads experiment documents from YAML (or JSON) files and environment
variables, validates them and caches the result.
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import ValidationError

from ..errors import ConfigValidationError
from .experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

BUILTIN_CONFIGS = {
    "scenario1": "scenario1.yaml",
    "scenario2": "scenario2.yaml",
}


class ConfigLoader:
    """Experiment configuration loader with environment variable support"""

    def __init__(self, config_dir: Optional[Path] = None):
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).parent
        self._config_cache: Dict[str, ExperimentConfig] = {}

    def resolve(self, name_or_path: Union[str, Path]) -> Path:
        """Built-in config names map to the packaged YAML files"""
        key = str(name_or_path)
        if key in BUILTIN_CONFIGS:
            return self.config_dir / BUILTIN_CONFIGS[key]
        return Path(name_or_path)

    def load_raw(self, name_or_path: Union[str, Path]) -> Dict[str, Any]:
        config_file = self.resolve(name_or_path)
        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_file}")

        with open(config_file, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
        if not isinstance(raw, dict):
            raise ConfigValidationError(f"{config_file} does not hold a mapping")
        return raw

    def load_experiment(self, name_or_path: Union[str, Path]) -> ExperimentConfig:
        """
        Load, apply environment overrides and validate an experiment document

        Returns:
            Validated ExperimentConfig (cached per resolved path)
        """
        key = str(self.resolve(name_or_path).resolve())
        if key in self._config_cache:
            return self._config_cache[key]

        raw = self._apply_env_overrides(self.load_raw(name_or_path))
        config = self.validate(raw)
        self._config_cache[key] = config
        logger.info(f"Loaded experiment config '{config.name}' from {key}")
        return config

    @staticmethod
    def validate(raw: Dict[str, Any]) -> ExperimentConfig:
        """
        Raises:
            ConfigValidationError: with one message per offending field
        """
        try:
            return ExperimentConfig.model_validate(raw)
        except ValidationError as exc:
            field_errors = {
                ".".join(str(part) for part in error["loc"]) or "<root>": error["msg"]
                for error in exc.errors()
            }
            details = "; ".join(f"{k}: {v}" for k, v in field_errors.items())
            raise ConfigValidationError(f"invalid experiment config: {details}", field_errors) from exc

    def _apply_env_overrides(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """
        Apply environment variable overrides

        FAULTISO_OUTPUT_DIR, FAULTISO_MASTER_SEED, FAULTISO_TRIALS and
        FAULTISO_WORKERS replace the matching fields.
        """
        config = copy.deepcopy(config)

        output_dir = os.getenv("FAULTISO_OUTPUT_DIR")
        if output_dir:
            config["output_dir"] = output_dir

        for env_name, field_name in (
            ("FAULTISO_MASTER_SEED", "master_seed"),
            ("FAULTISO_TRIALS", "trials"),
            ("FAULTISO_WORKERS", "workers"),
        ):
            value = os.getenv(env_name)
            if value:
                try:
                    config.setdefault("monte_carlo", {})[field_name] = int(value)
                except ValueError:
                    raise ConfigValidationError(
                        f"{env_name} must be an integer, got '{value}'", {env_name: "not an integer"}
                    )
        return config

    @staticmethod
    def reference_config() -> str:
        """YAML rendering of every field with its default"""
        return yaml.safe_dump(ExperimentConfig().model_dump(mode="json"), sort_keys=False)

    def clear_cache(self):
        """Clear configuration cache (useful for testing)"""
        self._config_cache.clear()


# Global config loader instance
config_loader = ConfigLoader()
