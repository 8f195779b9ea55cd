"""
Run configuration.

Precedence, lowest first: field defaults, ``SATO_TATE_*`` environment
variables (``.env`` loaded with python-dotenv), a key=value config file,
explicit overrides from the command line.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError

logger = logging.getLogger(__name__)

ENV_PREFIX = "SATO_TATE_"
MIN_COMPARE_SAMPLES = 1000

Mode = Literal["count", "identify", "compare", "sample"]


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    curve: Optional[str] = Field(None, description="Curve model, e.g. 'y^2=x^3+x+1'")
    endo: Optional[str] = Field(None, description="Path of an EndoData file")
    bound: int = Field(1000, description="Largest prime counted")
    seed: int = Field(0, description="Seed for every random stream of the run")
    n: int = Field(100000, description="Monte Carlo sample count")
    out: str = Field("output", description="Output directory")
    mode: Mode = Field("compare", description="Pipeline to run")
    workers: int = Field(1, description="Counting threads")
    candidates: Optional[List[str]] = Field(
        None, description="Candidate group ids overriding the genus defaults"
    )
    log_level: str = Field("INFO", description="Root log level")
    shard_size: int = Field(65536, description="Samples per random stream shard")

    @field_validator("candidates", mode="before")
    @classmethod
    def _split_candidates(cls, value: Any) -> Any:
        if isinstance(value, str):
            items = [item.strip() for item in value.split(",") if item.strip()]
            return items or None
        return value

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ConfigError(f"unknown log level {value!r}")
        return level

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.bound < 3:
            raise ConfigError(f"bound must be at least 3, got {self.bound}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        if self.shard_size < 1:
            raise ConfigError(f"shard_size must be positive, got {self.shard_size}")
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if self.mode == "compare" and self.n < MIN_COMPARE_SAMPLES:
            raise ConfigError(f"compare mode needs n >= {MIN_COMPARE_SAMPLES}, got {self.n}")
        if self.mode in ("count", "compare") and not self.curve:
            raise ConfigError(f"mode {self.mode} needs a curve")
        if self.mode == "identify" and not self.endo:
            raise ConfigError("mode identify needs an EndoData file")
        if self.mode == "sample" and not (self.endo or self.candidates):
            raise ConfigError("mode sample needs an EndoData file or candidates")
        return self

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


def _normalise_keys(values: Mapping[str, Optional[str]]) -> Dict[str, str]:
    fields = RunConfig.model_fields
    result = {}
    for key, value in values.items():
        name = key.lower()
        if name.startswith(ENV_PREFIX.lower()):
            name = name[len(ENV_PREFIX):]
        if name not in fields:
            raise ConfigError(f"unknown configuration key {key!r}")
        if value is not None and value != "":
            result[name] = value
    return result


def settings_from_env(environ: Optional[Mapping[str, str]] = None) -> Dict[str, str]:
    """``SATO_TATE_<FIELD>`` variables; other variables are ignored."""
    if environ is None:
        load_dotenv()
        environ = os.environ
    picked = {
        key: value
        for key, value in environ.items()
        if key.upper().startswith(ENV_PREFIX)
        and key[len(ENV_PREFIX):].lower() in RunConfig.model_fields
    }
    return _normalise_keys(picked)


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Parse a key=value file into RunConfig field names."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    return _normalise_keys(dotenv_values(path))


def load_config(
    config_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    merged: Dict[str, Any] = {}
    merged.update(settings_from_env(environ))
    if config_file is not None:
        merged.update(read_config_file(config_file))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = RunConfig(**merged)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc.errors()[0]['msg']}") from exc
    logger.debug("run configuration: %s", config.model_dump())
    return config
