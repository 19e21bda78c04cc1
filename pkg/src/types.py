"""Type definitions and exceptions for the two-layer channel solver."""

from typing import Any, Dict, Optional, Sequence, Union
import os

import numpy as np
import numpy.typing as npt


class ConfigurationError(Exception):
    """Custom exception for configuration issues."""

    def __init__(
        self,
        message: str,
        config_key: Optional[str] = None,
        line_number: Optional[int] = None,
    ) -> None:
        self.config_key: Optional[str] = config_key
        self.line_number: Optional[int] = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class GeometryError(Exception):
    """Raised for invalid channel geometry or out-of-range elevations."""

    def __init__(
        self, message: str, x: Optional[float] = None, z: Optional[float] = None
    ) -> None:
        self.x: Optional[float] = x
        self.z: Optional[float] = z
        super().__init__(message)


class VerticalGridOverflowError(GeometryError):
    """Raised when a wet area does not fit below the top of the vertical grid."""


class SolverError(Exception):
    """Base class for failures during time integration."""

    def __init__(self, message: str, time: Optional[float] = None) -> None:
        self.time: Optional[float] = time
        super().__init__(message)


class PositivityError(SolverError):
    """Negative cell-average area after a Runge-Kutta stage."""

    def __init__(
        self,
        message: str,
        cell: int,
        stage: int,
        time: Optional[float] = None,
    ) -> None:
        self.cell: int = cell
        self.stage: int = stage
        super().__init__(message, time)


class HyperbolicityLossError(SolverError):
    """Raised when hyperbolicity loss is configured as fatal."""

    def __init__(
        self, message: str, cells: Sequence[int], time: Optional[float] = None
    ) -> None:
        self.cells: Sequence[int] = tuple(cells)
        super().__init__(message, time)


class NegativeSoundSpeedError(SolverError):
    """A sound-speed radicand went negative, so the state has no real celerity."""


class ConservationError(SolverError):
    """Per-step mass balance of a layer failed in check mode."""

    def __init__(self, message: str, layer: int, time: Optional[float] = None) -> None:
        self.layer: int = layer
        super().__init__(message, time)


# Type aliases
FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.intp]
BoolArray = npt.NDArray[np.bool_]
ArrayLike = Union[float, FloatArray]
ConfigDict = Dict[str, Any]
PathLike = Union[str, "os.PathLike[str]"]
