"""Shared test configuration and fixtures."""

from pathlib import Path

import numpy as np
import pytest

from src.config.settings import PhysicalParams, SchemeParams, SimulationConfig, load_config
from src.geometry import ChannelGeometry, build_channel
from src.scenarios import rest_channel_bottom, rest_channel_width, unit_width, flat_bottom
from src.types import FloatArray


def linear_wall_width(x: FloatArray, z: FloatArray) -> FloatArray:
    """Trapezoidal section: unit bottom width, walls opening with slope 1/2."""
    return 1.0 + z + 0.0 * x


@pytest.fixture
def physics() -> PhysicalParams:
    return PhysicalParams(r=0.98)


@pytest.fixture
def scheme() -> SchemeParams:
    return SchemeParams()


@pytest.fixture
def unit_channel() -> ChannelGeometry:
    """Rectangular unit channel on [0, 1] with 20 cells."""
    return build_channel(unit_width, flat_bottom, (0.0, 1.0), 20, dz=0.01, z_top=2.0)


@pytest.fixture
def trapezoid_channel() -> ChannelGeometry:
    return build_channel(linear_wall_width, flat_bottom, (0.0, 1.0), 10, dz=0.05, z_top=2.0)


@pytest.fixture
def rest_channel() -> ChannelGeometry:
    """Contracting channel with a bottom step, 50 cells."""
    return build_channel(
        rest_channel_width, rest_channel_bottom, (0.0, 1.0), 50, dz=0.01, z_top=2.0
    )


@pytest.fixture
def riemann_config(tmp_path: Path) -> SimulationConfig:
    return load_config(
        overrides={
            "scenario": "riemann",
            "n_cells": 40,
            "t_end": 0.01,
            "output_times": (0.0, 0.005, 0.01),
            "output_dir": str(tmp_path / "out"),
        }
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
