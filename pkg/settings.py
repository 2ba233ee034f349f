"""
Runtime configuration: YAML defaults, .env files and environment overrides.
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import Dict

import yaml
from pydantic import BaseModel, Field, PositiveInt, ValidationError

from errors import InstanceFormatError
from logging_config import get_logger

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # dotenv not available, rely on system environment variables
    pass

logger = get_logger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / "conflict_forest.yaml"
CAPS_ENV_VAR = "CONFLICT_FOREST_CAPS"


class Caps(BaseModel):
    rho_links: PositiveInt = 18
    eta_neighborhood: PositiveInt = 12
    forest_links: PositiveInt = 20
    schedule_nodes: PositiveInt = 9
    schedule_links: PositiveInt = 12
    steiner_nodes: PositiveInt = 9
    steiner_links: PositiveInt = 16


class GridDefaults(BaseModel):
    separation: float = Field(2.0, gt=0)
    max_retries: int = Field(8, ge=0)


class RandomDefaults(BaseModel):
    max_attempts: PositiveInt = 50


class SteinerDefaults(BaseModel):
    potential_base: float = Field(2.0, gt=1)
    surrogate_constant: float = Field(4.0, gt=0)


class LoggingDefaults(BaseModel):
    level: str = "WARNING"


class Settings(BaseModel):
    caps: Caps = Caps()
    grid: GridDefaults = GridDefaults()
    random: RandomDefaults = RandomDefaults()
    steiner: SteinerDefaults = SteinerDefaults()
    logging: LoggingDefaults = LoggingDefaults()


def parse_caps_override(raw: str) -> Dict[str, int]:
    """
    Parse a ``name=value,name=value`` caps override string.

    Args:
        raw: Value of CONFLICT_FOREST_CAPS

    Returns:
        Mapping of cap name to integer value
    """
    overrides: Dict[str, int] = {}
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in Caps.model_fields:
            raise InstanceFormatError(f"{CAPS_ENV_VAR}: cannot parse {item!r}")
        try:
            overrides[name] = int(value)
        except ValueError:
            raise InstanceFormatError(f"{CAPS_ENV_VAR}: {name} needs an integer, got {value!r}")
    return overrides


def load_settings(path: Path = None) -> Settings:
    """
    Build Settings from the YAML file plus environment overrides.

    Args:
        path: YAML file; defaults to CONFLICT_FOREST_CONFIG or the bundled file

    Returns:
        Validated Settings
    """
    path = Path(path or os.getenv("CONFLICT_FOREST_CONFIG") or DEFAULT_CONFIG_PATH)
    data = {}
    if path.exists():
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}
        logger.debug(f"Loaded configuration from {path}")
    else:
        logger.warning(f"Config file {path} not found, using built-in defaults")

    raw_caps = os.getenv(CAPS_ENV_VAR)
    if raw_caps:
        caps = dict(data.get("caps") or {})
        caps.update(parse_caps_override(raw_caps))
        data["caps"] = caps
        logger.info(f"Caps overridden from environment: {raw_caps}")

    try:
        return Settings.model_validate(data)
    except ValidationError as e:
        raise InstanceFormatError(f"invalid configuration in {path}: {e}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings, loading them on first use."""
    return load_settings()


def reload_settings() -> Settings:
    """Drop the cached settings and load them again."""
    get_settings.cache_clear()
    return get_settings()
