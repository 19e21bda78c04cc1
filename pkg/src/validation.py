"""Input validation for command-line values and run requests."""

from typing import List, Sequence, Union
from pathlib import Path

from src.config.constants import ScenarioName
from src.types import ConfigurationError


def validate_scenario(name: str) -> ScenarioName:
    """Validate scenario name."""
    try:
        return ScenarioName(name.lower())
    except ValueError:
        raise ConfigurationError(
            f"Unknown scenario: {name}. Valid scenarios: {[s.value for s in ScenarioName]}",
            "scenario",
        )


def validate_resolutions(text: Union[str, Sequence[int]]) -> List[int]:
    """Parse a comma-separated list of cell counts."""
    if isinstance(text, str):
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise ConfigurationError(f"Invalid resolution list: {text!r}", "resolutions")
    else:
        values = [int(v) for v in text]
    if not values:
        raise ConfigurationError("Resolution list is empty", "resolutions")
    bad = [v for v in values if v < 4]
    if bad:
        raise ConfigurationError(f"Resolutions must be at least 4 cells: {bad}", "resolutions")
    return values


def validate_positive(value: float, name: str) -> float:
    """Validate a strictly positive number."""
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}", name)
    return value


def validate_cfl(value: float) -> float:
    """Validate CFL number in (0, 0.5]."""
    if not 0.0 < value <= 0.5:
        raise ConfigurationError(f"CFL number must lie in (0, 0.5], got {value}", "scheme.nu")
    return value


def validate_file_path(path: Union[str, Path]) -> Path:
    """Validate file path."""
    try:
        path = Path(path)
        if not path.parent.exists():
            raise ConfigurationError(f"Parent directory does not exist: {path.parent}")
        return path
    except ConfigurationError:
        raise
    except Exception as e:
        raise ConfigurationError(f"Invalid file path: {path}") from e


def validate_existing_file(path: Union[str, Path]) -> Path:
    """Validate that a file exists."""
    file_path = validate_file_path(path)
    if not file_path.is_file():
        raise ConfigurationError(f"File does not exist: {file_path}")
    return file_path
