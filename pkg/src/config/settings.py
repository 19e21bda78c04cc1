"""Simulation configuration models and the ``key = value`` config file loader."""

from pathlib import Path
from typing import Any, Dict, Iterator, Mapping, Optional, Tuple
import logging

from pydantic import Field, ValidationError, field_validator, model_validator

from src.config.constants import (
    DEFAULT_ALPHA,
    DEFAULT_CFL,
    DEFAULT_DELTA_A,
    DEFAULT_DELTA_B,
    DEFAULT_DENSITY_RATIO,
    DEFAULT_DZ,
    DEFAULT_N_CELLS,
    GRAVITY,
    LOGGER_NAME,
    MAX_CFL,
    STEADY_RHS_TOL,
    BoundaryMode,
    ScenarioName,
)
from src.config.pydantic_types import BaseModelStrict
from src.types import ConfigurationError, PathLike

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.config")


class PhysicalParams(BaseModelStrict):
    """Gravity, density ratio and closure coefficients."""

    g: float = Field(default=GRAVITY, gt=0.0)
    r: float = Field(default=DEFAULT_DENSITY_RATIO, gt=0.0, le=1.0)
    n_i: float = Field(default=0.0, ge=0.0)
    n_b: float = Field(default=0.0, ge=0.0)
    entrain_k: float = Field(default=0.0, ge=0.0)
    friction_enabled: bool = False
    entrainment_enabled: bool = False

    @property
    def eps(self) -> float:
        return 1.0 - self.r


class SchemeParams(BaseModelStrict):
    """Numerical parameters of the central-upwind scheme."""

    nu: float = Field(default=DEFAULT_CFL, gt=0.0, le=MAX_CFL)
    alpha: float = Field(default=DEFAULT_ALPHA, ge=1.0, lt=2.0)
    delta_B: float = Field(default=DEFAULT_DELTA_B, gt=0.0)
    delta_A: float = Field(default=DEFAULT_DELTA_A, gt=0.0)
    dz: float = Field(default=DEFAULT_DZ, gt=0.0)
    well_balanced: bool = True


class SimulationConfig(BaseModelStrict):
    """Complete description of one run."""

    scenario: ScenarioName
    n_cells: int = Field(default=DEFAULT_N_CELLS, ge=4)
    t_end: float = Field(gt=0.0)
    output_times: Tuple[float, ...] = ()
    output_dir: Path = Path("output")
    geometry_file: Optional[Path] = None
    z_top: float = Field(gt=0.0)
    perturbation: float = 0.0
    left_boundary: BoundaryMode = BoundaryMode.AUTOMATIC
    right_boundary: BoundaryMode = BoundaryMode.AUTOMATIC
    run_to_steady: bool = False
    steady_tol: float = Field(default=STEADY_RHS_TOL, gt=0.0)
    strict_hyperbolicity: bool = False
    check_conservation: bool = False
    max_steps: Optional[int] = Field(default=None, gt=0)
    physics: PhysicalParams = PhysicalParams()
    scheme: SchemeParams = SchemeParams()

    @field_validator("output_times", mode="before")
    @classmethod
    def _coerce_times(cls, value: Any) -> Any:
        if isinstance(value, (int, float)):
            return (float(value),)
        return value

    @model_validator(mode="after")
    def _check_output_times(self) -> "SimulationConfig":
        times = self.output_times
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError(f"output_times must be sorted, got {list(times)}")
        if times and (times[0] < 0.0 or times[-1] > self.t_end):
            raise ValueError(
                f"output_times must lie within [0, t_end={self.t_end}], got {list(times)}"
            )
        return self


# Per-scenario defaults as dotted keys; layered between built-ins and the config file.
SCENARIO_DEFAULTS: Dict[ScenarioName, Dict[str, Any]] = {
    ScenarioName.RIEMANN: {
        "t_end": 0.12,
        "output_times": (0.0, 0.12),
        "z_top": 2.0,
        "physics.r": 0.98,
    },
    ScenarioName.REST_PERTURBATION: {
        "t_end": 5.0,
        "output_times": (0.0, 0.03, 0.1, 5.0),
        "z_top": 2.0,
        "perturbation": 1e-2,
        "physics.r": 0.98,
        "physics.n_i": 0.009,
        "physics.n_b": 0.009,
        "physics.friction_enabled": True,
    },
    ScenarioName.INTERNAL_WAVE: {
        "t_end": 200.0,
        "output_times": (0.0,),
        "z_top": 2.5,
        "run_to_steady": True,
        "left_boundary": BoundaryMode.INFLOW,
        "physics.r": 0.98,
    },
    ScenarioName.INTERNAL_WAVE_PERTURBATION: {
        "t_end": 10.0,
        "output_times": (0.0, 0.2, 1.0, 3.0, 10.0),
        "z_top": 2.5,
        "perturbation": 0.2,
        "left_boundary": BoundaryMode.INFLOW,
        "physics.r": 0.98,
    },
    ScenarioName.LOCK_EXCHANGE: {
        "t_end": 50.0,
        "output_times": (0.0, 1.0, 5.0, 50.0),
        "z_top": 2.0,
        "physics.r": 0.95,
        "physics.n_i": 0.009,
        "physics.n_b": 0.009,
        "physics.friction_enabled": True,
        "scheme.delta_B": 1e-3,
    },
    ScenarioName.GRAVITY_CURRENT: {
        "t_end": 2.0,
        "output_times": (0.0, 1.0, 1.5, 2.0),
        "z_top": 2.0,
        "left_boundary": BoundaryMode.INFLOW,
        "physics.r": 0.95,
        "physics.n_i": 0.009,
        "physics.n_b": 0.009,
        "physics.entrain_k": 0.1,
        "physics.friction_enabled": True,
        "physics.entrainment_enabled": True,
        "scheme.delta_B": 1e-3,
    },
}

_SECTIONS = {"physics": PhysicalParams, "scheme": SchemeParams}


def parse_value(raw: str) -> Any:
    """Interpret a config value: bool, int, float, comma list or string."""
    text = raw.strip()
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if "," in text:
        return tuple(parse_value(part) for part in text.split(",") if part.strip())
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text.strip("\"'")


def _iter_config_lines(path: Path) -> Iterator[Tuple[int, str, str]]:
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigurationError(
                f"expected 'key = value', got {content!r}", line_number=number
            )
        key, value = content.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigurationError("missing key before '='", line_number=number)
        yield number, key, value


def read_config_file(path: PathLike) -> Tuple[Dict[str, Any], Dict[str, int]]:
    """Read dotted ``key = value`` pairs, returning values and their line numbers."""
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigurationError(f"Config file not found: {config_path}")
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    for number, key, raw in _iter_config_lines(config_path):
        _check_key(key, number)
        values[key] = parse_value(raw)
        lines[key] = number
    return values, lines


def _check_key(key: str, line_number: Optional[int] = None) -> None:
    section, _, name = key.partition(".")
    if name:
        model = _SECTIONS.get(section)
        if model is None or name not in model.model_fields:
            raise ConfigurationError(f"Unknown config key: {key}", key, line_number)
    elif key not in SimulationConfig.model_fields or key in _SECTIONS:
        raise ConfigurationError(f"Unknown config key: {key}", key, line_number)


def _nest(flat: Mapping[str, Any]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        section, _, name = key.partition(".")
        if name:
            nested.setdefault(section, {})[name] = value
        else:
            nested[key] = value
    return nested


def load_config(
    path: Optional[PathLike] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> SimulationConfig:
    """Build a :class:`SimulationConfig`.

    Precedence: model defaults < scenario defaults < config file < overrides.
    Override keys use the same dotted names as the file.
    """
    file_values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    if path is not None:
        file_values, lines = read_config_file(path)
    given: Dict[str, Any] = {**file_values}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        _check_key(key)
        given[key] = value
        lines.pop(key, None)

    if "scenario" not in given:
        raise ConfigurationError("No scenario given (set 'scenario' or --scenario)", "scenario")
    try:
        scenario = ScenarioName(given["scenario"])
    except ValueError:
        valid = [s.value for s in ScenarioName]
        raise ConfigurationError(
            f"Unknown scenario {given['scenario']!r}. Valid scenarios: {valid}",
            "scenario",
            lines.get("scenario"),
        )

    merged: Dict[str, Any] = {**SCENARIO_DEFAULTS[scenario], **given}
    merged["scenario"] = scenario
    try:
        config = SimulationConfig(**_nest(merged))
    except ValidationError as e:
        error = e.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or "output_times"
        raise ConfigurationError(
            f"Invalid value for {key}: {error['msg']}", key, lines.get(key)
        ) from e
    logger.debug(f"Loaded configuration for scenario {scenario.value}")
    return config
