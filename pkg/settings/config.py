from builtins import bool, float, int, str
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

CONFIG_ENV_VAR = "SHOTFLOW_CONFIG"

class Settings(BaseSettings):
    """Run configuration shared by every shotflow command."""
    model_config = SettingsConfigDict(
        env_prefix="SHOTFLOW_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Allocation model
    shot_cap: float = Field(default=0.40, description="Upper bound on any single player's fraction of team shots")
    grid_step: float = Field(default=0.005, description="Grid resolution used by the brute-force oracle")

    # Box-score metrics
    ft_weight: float = Field(default=0.44, description="Free-throw weight in the true shooting denominator")
    regulation_minutes: float = Field(default=48.0, description="Minutes in a regulation game")

    # Fitting and player groups
    min_games_fit: int = Field(default=10, description="Minimum games needed to fit a shooting profile")
    starters_threshold: int = Field(default=30, description="Games started to count as a regular starter")
    roster_threshold: int = Field(default=10, description="Games played to count as a roster player")

    # Output
    float_decimals: int = Field(default=6, description="Decimal places for every serialized float")
    log_level: str = Field(default="INFO", description="Root log level")

    @field_validator("shot_cap")
    @classmethod
    def shot_cap_range(cls, value: float) -> float:
        if not 0.0 < value <= 1.0:
            raise ValueError("shot_cap must lie in (0, 1]")
        return value

    @field_validator("min_games_fit")
    @classmethod
    def min_games_determinable(cls, value: int) -> int:
        if value < 2:
            raise ValueError("min_games_fit must be at least 2 to determine a line")
        return value

    @field_validator("starters_threshold", "roster_threshold", "float_decimals")
    @classmethod
    def at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("thresholds must be at least 1")
        return value

    @field_validator("ft_weight")
    @classmethod
    def non_negative_weight(cls, value: float) -> float:
        if value < 0:
            raise ValueError("ft_weight must be non-negative")
        return value

    @field_validator("regulation_minutes")
    @classmethod
    def positive_minutes(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("regulation_minutes must be positive")
        return value

    @field_validator("grid_step")
    @classmethod
    def grid_step_divides_one(cls, value: float) -> float:
        if not 0.0 < value <= 1.0:
            raise ValueError("grid_step must lie in (0, 1]")
        units = round(1.0 / value)
        if abs(units * value - 1.0) > 1e-9:
            raise ValueError("grid_step must divide 1 evenly")
        return value

    @field_validator("log_level")
    @classmethod
    def known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {value!r}")
        return level

    @model_validator(mode="after")
    def cap_admits_a_lineup(self) -> "Settings":
        # five players at the cap must be able to cover every shot
        if 5 * self.shot_cap < 1.0 - 1e-12:
            raise ValueError("5 * shot_cap must be at least 1, otherwise every lineup is infeasible")
        return self

    @property
    def grid_units(self) -> int:
        """Number of grid steps that make up one whole allocation."""
        return round(1.0 / self.grid_step)

    def to_json(self) -> str:
        """Serialize in field order; the output re-parses to an equal Settings."""
        return json.dumps(self.model_dump(), indent=2) + "\n"


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a JSON config file into a plain mapping of Settings fields."""
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return data


def build_settings(config_path: Optional[Union[str, Path]] = None, **overrides: Any) -> Settings:
    """
    Build Settings from a config file plus explicit overrides.

    Overrides whose value is None are ignored so unset CLI flags fall through to the file,
    then to SHOTFLOW_* environment variables, then to the defaults.
    """
    values: Dict[str, Any] = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    values.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**values)

# Instantiate settings to be imported in your application
settings = Settings()
