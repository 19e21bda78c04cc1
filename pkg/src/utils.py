"""Utility functions for the two-layer channel solver."""

from typing import Dict, Optional, Sequence, Union
import os
from pathlib import Path
from logging import Logger

import numpy as np

from src.config.constants import CSV_PRECISION, DEFAULT_LOG_LEVEL
from src.config.logging_config import configure_logging
from src.types import FloatArray


def setup_logging(
    level: Optional[str] = None,
    log_file: Optional[str] = None,
    config_file: Optional[str] = None,
) -> Logger:
    """Configure logging for the application; ``LOG_LEVEL`` is the fallback level."""
    log_level: str = (level or os.environ.get("LOG_LEVEL", DEFAULT_LOG_LEVEL)).upper()
    if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        log_level = DEFAULT_LOG_LEVEL
    return configure_logging(
        log_level=log_level,
        log_file=Path(log_file) if log_file else None,
        config_file=Path(config_file) if config_file else None,
    )


def write_csv(
    path: Union[str, Path], columns: Sequence[str], rows: FloatArray
) -> Path:
    """Write a table with a header line and 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if data.size and data.shape[1] != len(columns):
        raise ValueError(f"{len(columns)} columns declared, rows have {data.shape[1]}")
    np.savetxt(path, data, delimiter=",", fmt=CSV_PRECISION, header=",".join(columns), comments="")
    return path


def append_csv_rows(
    path: Union[str, Path], columns: Sequence[str], rows: FloatArray
) -> Path:
    """Append rows, writing the header first when the file is new."""
    path = Path(path)
    data = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if not path.exists():
        return write_csv(path, columns, data)
    with open(path, "a") as f:
        np.savetxt(f, data, delimiter=",", fmt=CSV_PRECISION)
    return path


def read_csv(path: Union[str, Path]) -> Dict[str, FloatArray]:
    """Read a table written by :func:`write_csv` into named columns."""
    path = Path(path)
    with open(path) as f:
        header = f.readline().strip().split(",")
    data = np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2))
    return {name: data[:, k] for k, name in enumerate(header)}
