"""
Configuration Module
Loads YAML configuration, environment overrides and logging setup.
"""

import logging
import logging.config
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "configs" / "config.yaml"
DEFAULT_LOGGING_CONFIG_PATH = PROJECT_ROOT / "configs" / "logging_config.yaml"

ENV_CONFIG = "LAGRANGIAN_GAMMA_CONFIG"
ENV_WORKERS = "LAGRANGIAN_GAMMA_WORKERS"
ENV_LOG_LEVEL = "LAGRANGIAN_GAMMA_LOG_LEVEL"

# Fallbacks used when no YAML file is available; kept in sync with configs/config.yaml
DEFAULTS: Dict[str, Any] = {
    "tolerances": {
        "validation": 1e-10,
        "closure": 1e-9,
        "residual": 1e-11,
    },
    "degree": {
        "default_angles": "uniform",
    },
    "lemma": {
        "brute_force_max_n": 25,
        "recursion_max_n": 62,
        "chunk_bits": 20,
    },
    "search": {
        "starts": 500,
        "max_iter": 50,
        "step_tol": 1e-12,
        "residual_tol": 1e-10,
        "dedup_tol": 1e-6,
        "fd_step": 1e-6,
        "reorthonormalize_every": 10,
        "seed": 7,
    },
    "verify": {
        "trials": 200,
        "seed": 42,
    },
    "framework": {
        "spectrum_samples": 100,
        "seed": 42,
    },
    "runtime": {
        "seed": 42,
        "workers": 1,
    },
    "logging": {
        "level": "WARNING",
    },
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from YAML, layered over the built-in defaults.

    Args:
        config_path: Optional path to a YAML file. Falls back to the
            LAGRANGIAN_GAMMA_CONFIG environment variable, then configs/config.yaml.

    Returns:
        Configuration dictionary
    """
    load_dotenv()

    path = config_path or os.getenv(ENV_CONFIG)
    path = Path(path) if path else DEFAULT_CONFIG_PATH

    config = _merge({}, DEFAULTS)
    if path.exists():
        try:
            with open(path, "r", encoding="utf-8") as f:
                config = _merge(config, yaml.safe_load(f) or {})
            logger.debug(f"Loaded configuration from {path}")
        except yaml.YAMLError as e:
            logger.error(f"Invalid YAML in {path}: {e}")
            raise
    elif config_path:
        raise FileNotFoundError(f"Config file not found: {path}")

    workers = os.getenv(ENV_WORKERS)
    if workers:
        try:
            config["runtime"]["workers"] = max(1, int(workers))
        except ValueError:
            logger.warning(f"Ignoring non-integer {ENV_WORKERS}={workers!r}")

    level = os.getenv(ENV_LOG_LEVEL)
    if level:
        config["logging"]["level"] = level.upper()

    return config


def setup_logging(config: Optional[Dict[str, Any]] = None, level: Optional[str] = None) -> None:
    """
    Configure logging from configs/logging_config.yaml.

    Args:
        config: Configuration dictionary (its logging.level is applied)
        level: Explicit level overriding the configuration
    """
    config = config or {}
    level = (level or config.get("logging", {}).get("level", "WARNING")).upper()

    if DEFAULT_LOGGING_CONFIG_PATH.exists():
        with open(DEFAULT_LOGGING_CONFIG_PATH, "r", encoding="utf-8") as f:
            logging_config = yaml.safe_load(f)

        for handler in logging_config.get("handlers", {}).values():
            filename = handler.get("filename")
            if filename:
                Path(filename).parent.mkdir(parents=True, exist_ok=True)
            if handler.get("class") == "logging.StreamHandler":
                handler["level"] = level

        root = logging_config.setdefault("root", {})
        if logging.getLevelName(level) < logging.getLevelName(root.get("level", "INFO")):
            root["level"] = level

        logging.config.dictConfig(logging_config)
    else:
        logging.basicConfig(
            level=level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        )
