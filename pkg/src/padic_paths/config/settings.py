"""Run configuration for the command-line front end."""

from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from dotenv import dotenv_values
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..propagator.gauss import DEFAULT_TERM_BUDGET
from ..propagator.actions import DEFAULT_SERIES_TARGET
from ..propagator.padic_core import Place, parse_rational

ENV_PREFIX = "PADIC_"

# places the randomized suites cover when no place is configured
DEFAULT_PLACES = ("2", "3", "5", "7", "inf")


class RunConfig(BaseSettings):
    """Settings shared by every subcommand.

    Precedence: defaults < PADIC_* environment < --config file < flags.
    """

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, extra="ignore", arbitrary_types_allowed=True)

    place: Optional[str] = Field(None, description="Prime or inf; None runs the suite default set")
    h: Fraction = Field(Fraction(1), description="Planck constant as a nonzero rational")
    tolerance: float = Field(1e-9, gt=0)
    term_budget: int = Field(DEFAULT_TERM_BUDGET, ge=1)
    seed: int = 0
    output: Literal["json", "table"] = "json"
    workers: int = Field(1, ge=1)
    series_target: int = Field(DEFAULT_SERIES_TARGET, ge=1)
    log_level: str = "WARNING"
    log_format: Literal["console", "json"] = Field("console", description="stderr log renderer")

    @field_validator("place", mode="before")
    @classmethod
    def _check_place(cls, value: Any) -> Optional[str]:
        if value is None or value == "":
            return None
        return str(Place.parse(str(value)))

    @field_validator("h", mode="before")
    @classmethod
    def _check_h(cls, value: Any) -> Fraction:
        h = value if isinstance(value, Fraction) else parse_rational(str(value))
        if h == 0:
            raise ValueError("h must be nonzero")
        return h

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        level = value.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR"}:
            raise ValueError(f"unknown log level {value!r}")
        return level

    def places(self, defaults: Optional[List[str]] = None) -> List[Place]:
        """The configured place, or the given default set."""
        if self.place is not None:
            return [Place.parse(self.place)]
        return [Place.parse(p) for p in (defaults or DEFAULT_PLACES)]


def read_config_file(path: Path) -> Dict[str, str]:
    """Parse a key=value file; keys may carry the PADIC_ prefix."""
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    values: Dict[str, str] = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            continue
        name = key.lower()
        if name.startswith(ENV_PREFIX.lower()):
            name = name[len(ENV_PREFIX):]
        values[name] = value
    return values


def load_config(path: Optional[Path] = None, **overrides: Any) -> RunConfig:
    """Build the run configuration; overrides set to None are ignored."""
    values: Dict[str, Any] = read_config_file(path) if path is not None else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
