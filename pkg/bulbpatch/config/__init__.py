"""Experiment configuration."""
from bulbpatch.config.config import (
    DEFAULT_CONFIG_PATH,
    apply_overrides,
    load_config,
    read_config_file,
    resolve_config_path,
)
from bulbpatch.config.models import DetectorSpec, ExperimentConfig
from bulbpatch.config.settings import Settings, get_settings

__all__ = [
    "DEFAULT_CONFIG_PATH",
    "DetectorSpec",
    "ExperimentConfig",
    "Settings",
    "apply_overrides",
    "get_settings",
    "load_config",
    "read_config_file",
    "resolve_config_path",
]
