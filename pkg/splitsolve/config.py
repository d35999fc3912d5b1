"""
Module for managing run configuration.
"""

import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from .constants import (
    DEFAULT_CG_TOLERANCE,
    DEFAULT_GRID,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_MAX_WORKERS,
    DEFAULT_SIZE_CAP,
    DEFAULT_TOLERANCE,
    ORDERINGS,
    OUTPUT_FORMATS,
)
from .exceptions import ConfigurationError

# --- Configuration ---
CONFIG_FILE = os.getenv("SPLITSOLVE_CONFIG_FILE", "splitsolve.json")
OUTPUT_DIR = os.getenv("SPLITSOLVE_OUTPUT_DIR", "results")
CACHE_DIR = os.getenv("SPLITSOLVE_CACHE_DIR", "_splitsolve_cache")
USE_CACHE = os.getenv("SPLITSOLVE_USE_CACHE", "true").lower() in ("true", "1", "yes")


@dataclass(frozen=True)
class RunDefaults:
    """Defaults applied to every CLI request before flags are considered."""

    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    inner: str = "cholesky"
    cg_tolerance: float = DEFAULT_CG_TOLERANCE
    ordering: str = "natural"
    format: str = "markdown"
    max_workers: int = DEFAULT_MAX_WORKERS
    size_cap: int = DEFAULT_SIZE_CAP
    grid: Tuple[float, float, float] = DEFAULT_GRID
    output_dir: str = OUTPUT_DIR
    use_cache: Optional[bool] = None

    def __post_init__(self):
        if not 0.0 < self.tolerance < 1.0:
            raise ConfigurationError(f"tolerance must lie in (0, 1), got {self.tolerance}")
        if self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.inner not in ("cholesky", "cg"):
            raise ConfigurationError(f"inner must be 'cholesky' or 'cg', got {self.inner!r}")
        if self.ordering not in ORDERINGS:
            raise ConfigurationError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigurationError(f"format must be one of {OUTPUT_FORMATS}, got {self.format!r}")
        if self.max_workers < 1:
            raise ConfigurationError("max_workers must be >= 1")
        if self.size_cap < 1:
            raise ConfigurationError("size_cap must be >= 1")
        if len(self.grid) != 3:
            raise ConfigurationError("grid must be [lo, hi, step]")
        if self.use_cache is not None and not isinstance(self.use_cache, bool):
            raise ConfigurationError(f"use_cache must be true or false, got {self.use_cache!r}")


def load_config(config_file: Optional[str] = None) -> RunDefaults:
    """
    Load run defaults from a JSON file, falling back to built-in values.

    Args:
        config_file: Path of the JSON file; defaults to SPLITSOLVE_CONFIG_FILE

    Returns:
        RunDefaults: merged defaults

    Raises:
        ConfigurationError: If the file exists but is invalid
    """
    config_path = Path(config_file or CONFIG_FILE)

    if not config_path.exists():
        if config_file is not None:
            raise ConfigurationError(f"Configuration file '{config_path}' not found.")
        return RunDefaults()

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Error parsing JSON file: {e}")
    except OSError as e:
        raise ConfigurationError(f"Error loading configuration: {e}")

    if not isinstance(config, dict):
        raise ConfigurationError("Configuration file must hold a JSON object.")

    return apply_overrides(RunDefaults(), config)


def apply_overrides(defaults: RunDefaults, overrides: Dict[str, Any]) -> RunDefaults:
    """Return `defaults` with the non-None entries of `overrides` applied."""
    known = {f.name for f in fields(RunDefaults)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")

    values = {key: value for key, value in overrides.items() if value is not None}
    if "grid" in values:
        values["grid"] = tuple(float(v) for v in values["grid"])
    try:
        return replace(defaults, **values)
    except TypeError as e:
        raise ConfigurationError(f"Invalid configuration value: {e}")


def ensure_directories(*directories: str) -> None:
    """Create the given directories (default: output and cache) if they don't exist."""
    try:
        for directory in directories or (OUTPUT_DIR, CACHE_DIR):
            Path(directory).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"Unable to create directories: {e}")
