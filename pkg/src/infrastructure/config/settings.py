"""
Run configuration: defaults, flat YAML file, environment and CLI overrides.

Precedence, lowest first: model defaults, config file, environment
(LADDER_CACHE_DIR, LADDER_OUTPUT_DIR, read after loading .env), CLI flags.
"""

import math
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from src.shared.errors import ValidationError
from src.shared.logging import get_logger

logger = get_logger(__name__)

ENV_OVERRIDES = {
    "LADDER_CACHE_DIR": "cache_dir",
    "LADDER_OUTPUT_DIR": "output_dir",
}


class RunConfig(BaseModel):
    """Every knob of a pipeline run; defaults are the reference ladder."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_rungs: int = Field(default=6, ge=1)
    rb_over_a: float = Field(default=2.35, gt=0.0)
    delta_over_omega: float = 3.5
    size_a: Optional[int] = None

    grid_min_exponent: float = -7.0
    grid_max_exponent: float = Field(default=-0.5, le=0.0)
    grid_points: int = Field(default=121, ge=1)

    shots: Optional[int] = Field(default=None, ge=1)
    min_count: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=1234, ge=0)

    tol: float = Field(default=1e-10, gt=0.0)
    max_iterations: int = Field(default=500, ge=1)

    subsample_size: int = Field(default=1000, ge=1)
    n_subsamples: int = Field(default=1000, ge=1)

    cache_dir: Path = Path(".ladder_cache")
    output_dir: Path = Path("results")
    max_exact_atoms: int = Field(default=22, ge=2)
    allow_large: bool = False
    workers: int = Field(default=1, ge=1)

    # provenance only; the physics uses the dimensionless ratios
    omega_mhz: float = 5.0 * math.pi
    rb_um: float = 8.375

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.size_a is not None and not 1 <= self.size_a <= self.n_atoms - 1:
            raise ValueError(f"size_a must be in [1, {self.n_atoms - 1}] for {self.n_rungs} rungs, got {self.size_a}")
        if self.grid_min_exponent > self.grid_max_exponent:
            raise ValueError("grid_min_exponent must not exceed grid_max_exponent")
        return self

    @property
    def n_atoms(self) -> int:
        return 2 * self.n_rungs

    @property
    def resolved_size_a(self) -> int:
        return self.size_a if self.size_a is not None else self.n_atoms // 2

    def with_updates(self, **changes: Any) -> "RunConfig":
        """Validated copy with some fields replaced."""
        return build_config({**self.model_dump(), **changes})


def build_config(values: Mapping[str, Any]) -> RunConfig:
    try:
        return RunConfig(**values)
    except PydanticValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}" for error in exc.errors()
        )
        raise ValidationError(f"invalid configuration: {problems}") from exc


class ConfigLoader:
    """Loads and caches the flat YAML config file, then layers overrides."""

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = Path(config_path) if config_path is not None else None
        self._file_cache: Optional[Dict[str, Any]] = None

    def load_file(self) -> Dict[str, Any]:
        if self._file_cache is not None:
            return self._file_cache
        if self.config_path is None:
            self._file_cache = {}
            return self._file_cache
        try:
            with open(self.config_path, "r", encoding="utf-8") as handle:
                loaded = yaml.safe_load(handle)
        except FileNotFoundError as exc:
            raise ValidationError(f"configuration file not found: {self.config_path}") from exc
        except yaml.YAMLError as exc:
            raise ValidationError(f"configuration file {self.config_path} is not valid YAML: {exc}") from exc

        loaded = loaded or {}
        if not isinstance(loaded, dict) or any(isinstance(value, (dict, list)) for value in loaded.values()):
            raise ValidationError(f"configuration file {self.config_path} must be a flat key: value mapping")
        logger.info("config_loaded", path=str(self.config_path), keys=sorted(loaded))
        self._file_cache = loaded
        return self._file_cache

    def environment(self) -> Dict[str, Any]:
        load_dotenv()
        return {field: os.environ[name] for name, field in ENV_OVERRIDES.items() if os.environ.get(name)}

    def resolve(self, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
        values: Dict[str, Any] = {}
        values.update(self.load_file())
        values.update(self.environment())
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})
        return build_config(values)
