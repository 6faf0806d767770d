from pathlib import Path
from typing import Dict, Iterable, Optional

from dotenv import dotenv_values

from src.core.errors import ConfigError
from src.models.experiment import EXPERIMENT_KINDS, ExperimentConfig, build_config
from src.services.recipes import get_recipe
from src.utils.logging import get_logger

logger = get_logger(__name__)


def read_config_file(path: str) -> Dict[str, str]:
    """
    Read a flat `key = value` file with `#` comments.

    Args:
        path: Config file path

    Returns:
        dict: Raw string values, keys as written
    """
    if not Path(path).is_file():
        raise ConfigError(f"config file {path} not found", key="config")
    values = dotenv_values(path, encoding="utf-8")
    missing = [key for key, value in values.items() if value is None]
    if missing:
        raise ConfigError(f"config key {missing[0]!r} has no value", key=missing[0])
    logger.debug(f"Read {len(values)} keys from {path}")
    return dict(values)


def parse_overrides(pairs: Iterable[str]) -> Dict[str, str]:
    """Split `key=value` strings from repeated --set flags."""
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {pair!r}", key=pair)
        overrides[key.strip()] = value.strip()
    return overrides


def resolve_config(
    name: str,
    config_file: Optional[str] = None,
    overrides: Optional[Dict[str, str]] = None,
    flags: Optional[Dict[str, object]] = None,
) -> ExperimentConfig:
    """
    Merge recipe bindings, config file, --set pairs and flags, in that order.

    Args:
        name: An experiment kind or a recipe name
        config_file: Optional flat key = value file
        overrides: Values from --set
        flags: Values from dedicated flags (out, workers, seed); None entries are skipped

    Returns:
        ExperimentConfig: the validated configuration
    """
    if name in EXPERIMENT_KINDS:
        values: Dict[str, object] = {"kind": name}
    else:
        recipe = get_recipe(name)
        values = {"kind": recipe.kind, "recipe": recipe.name, **recipe.bindings}

    if config_file:
        values.update(read_config_file(config_file))
    values.update(overrides or {})
    values.update({key: value for key, value in (flags or {}).items() if value is not None})

    for key, value in list(values.items()):
        if isinstance(value, str) and value.strip().lower() in ("", "none"):
            values[key] = None
    if values.get("kind") is None:
        raise ConfigError("experiment kind is missing", key="kind")

    config = build_config(values)
    logger.debug(f"Resolved config for {name}: {config.provenance()}")
    return config
