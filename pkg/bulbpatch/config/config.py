"""
Experiment configuration loading

Reads the JSON experiment config (packaged defaults, BULBPATCH_CONFIG_PATH or
an explicit path), applies ``section.key=value`` overrides, logs soft
validation warnings and hard-validates through the pydantic models.
"""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import ValidationError as PydanticValidationError

from bulbpatch.config.models import ExperimentConfig
from bulbpatch.config.settings import get_settings
from bulbpatch.utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent / "config.json"
KNOWN_SECTIONS = set(ExperimentConfig.model_fields)
# physical boards stop being practical well before this many bulbs
MANY_BULBS = 64


def resolve_config_path(path: Optional[Union[str, Path]] = None) -> Path:
    if path:
        return Path(path)
    env_path = get_settings().config_path
    if env_path:
        return Path(env_path)
    return DEFAULT_CONFIG_PATH


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path) as f:
            raw = json.load(f)
    except FileNotFoundError as e:
        raise ConfigurationError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    logger.info(f"Loaded configuration from {path}")
    return raw


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply ``section.key=value`` overrides; values are JSON when they parse, strings otherwise."""
    result = copy.deepcopy(raw)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"override '{item}' must look like section.key=value")
        parts = key.split(".")
        node = result
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationError(f"override '{item}': '{part}' is not a section")
            node = child
        node[parts[-1]] = _parse_value(value)
    return result


def _validate_config(config: dict) -> List[str]:
    """Validate configuration structure and values. Returns list of warnings."""
    warnings: List[str] = []

    for section in config:
        if section not in KNOWN_SECTIONS:
            warnings.append(f"unknown section '{section}' will be rejected")

    patch = config.get("patch", {})
    attack = config.get("attack", {})
    evaluation = config.get("evaluation", {})
    detectors = config.get("detectors")
    transfer = config.get("transfer", {})

    if isinstance(patch.get("M"), int) and patch["M"] > MANY_BULBS:
        warnings.append(f"patch.M={patch['M']} bulbs is hard to build on a physical board")
    if patch.get("M") == 0:
        warnings.append("patch.M is 0: optimize will only report blank-board losses")
    if attack.get("iterations") == 0:
        warnings.append("attack.iterations is 0: optimize returns the initial patch")
    if attack.get("mode") == "pixel" and attack.get("optimizer") not in (None, "analytic-sgd"):
        warnings.append("pixel mode always runs analytic-sgd")

    lam = attack.get("tv_weight")
    if isinstance(lam, (int, float)) and lam > 10:
        warnings.append("attack.tv_weight > 10 lets the TV term dominate objectness")

    # absent means the built-in toy detector
    if detectors is not None and (not isinstance(detectors, list) or not detectors):
        warnings.append("detectors should be a non-empty list")
    elif detectors:
        names = {d.get("name") for d in detectors if isinstance(d, dict)}
        for role in ("attack", "evaluate"):
            if not any(role in d.get("roles", ["attack", "evaluate"]) for d in detectors if isinstance(d, dict)):
                warnings.append(f"no detector has the '{role}' role")
        for name in [transfer.get("single")] + list(transfer.get("ensemble", [])) + list(transfer.get("holdout", [])):
            if name and name not in names:
                warnings.append(f"transfer references unknown detector '{name}'")

    scales = evaluation.get("scales", [])
    if scales and 1 not in scales and 1.0 not in scales:
        warnings.append("evaluation.scales has no 1.0 entry; reports lack the nominal size")
    iou_threshold = evaluation.get("iou_threshold")
    if isinstance(iou_threshold, (int, float)) and iou_threshold != 0.5:
        warnings.append(f"evaluation.iou_threshold={iou_threshold} differs from the usual 0.5")

    return warnings


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Sequence[str] = (),
    seed: Optional[int] = None,
) -> ExperimentConfig:
    """Load, override, soft-check and hard-validate the experiment config."""
    config_path = resolve_config_path(path)
    raw = apply_overrides(read_config_file(config_path), overrides)
    if seed is not None:
        raw.setdefault("experiment", {})["seed"] = seed
    settings = get_settings()
    if settings.workers is not None and not any(o.startswith("experiment.workers=") for o in overrides):
        raw.setdefault("experiment", {})["workers"] = settings.workers

    for warning in _validate_config(raw):
        logger.warning(f"Config validation warning: {warning}")

    try:
        return ExperimentConfig.model_validate(raw)
    except PydanticValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigurationError(f"invalid config {config_path}: {where}: {first['msg']}") from e
