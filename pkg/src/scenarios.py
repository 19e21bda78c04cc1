"""Builtin experiments: channel, initial state and boundary data."""

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Union
import logging

import numpy as np

from src.config.constants import LOGGER_NAME, BoundaryMode, ScenarioName
from src.config.settings import PhysicalParams, SchemeParams, SimulationConfig
from src.geometry import ChannelGeometry, build_channel, load_tabulated_channel
from src.state import FlowState
from src.stepper import BoundaryCondition, BoundarySpec
from src.types import ConfigurationError, FloatArray

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.scenarios")


@dataclass(frozen=True, eq=False)
class Scenario:
    name: ScenarioName
    geometry: ChannelGeometry
    state: FlowState
    boundary: BoundarySpec
    physics: PhysicalParams
    scheme: SchemeParams


def unit_width(x: FloatArray, z: FloatArray) -> FloatArray:
    return np.ones(np.broadcast(x, z).shape)


def flat_bottom(x: FloatArray) -> FloatArray:
    return np.zeros_like(x)


def rest_channel_width(x: FloatArray, z: FloatArray) -> FloatArray:
    """Square-root walls with a smooth contraction on [0.4, 0.8)."""
    root = np.sqrt(np.maximum(z, 0.0))
    contraction = 1.0 - 0.25 * (1.0 + np.cos(np.pi * (x - 0.6) / 0.2))
    inside = (x >= 0.4) & (x < 0.8)
    return np.where(inside, 0.5 + 0.5 * root * contraction, 0.5 * (1.0 + root))


def rest_channel_bottom(x: FloatArray) -> FloatArray:
    """Flat, cosine ramp, then a step down to 1/4 at x = 0.4."""
    return np.select(
        [x <= 0.15, x <= 0.4],
        [np.zeros_like(x), 0.25 * (1.0 + np.cos(4.0 * np.pi * (x - 0.4)))],
        default=0.25,
    )


def bump_channel_width(x: FloatArray, z: FloatArray) -> FloatArray:
    """Channel with a lateral contraction and an obstacle bulging from the walls."""
    return (
        1.0
        - 0.5 * np.maximum(0.5 - 2.0 * (x - 1.25) ** 2, 0.0)
        + z / 10.0
        - 1.5 * np.maximum(0.5 - 0.5 * (x - 1.0) ** 2 - (z - 1.5) ** 2, 0.0)
    )


def bump_channel_bottom(x: FloatArray) -> FloatArray:
    return 0.3 * np.maximum(0.5 - 2.0 * (x - 0.75) ** 2, 0.0)


_CHANNELS: Dict[ScenarioName, Tuple[Callable, Callable, Tuple[float, float]]] = {
    ScenarioName.RIEMANN: (unit_width, flat_bottom, (0.0, 1.0)),
    ScenarioName.REST_PERTURBATION: (rest_channel_width, rest_channel_bottom, (0.0, 1.0)),
    ScenarioName.INTERNAL_WAVE: (bump_channel_width, bump_channel_bottom, (0.0, 2.0)),
    ScenarioName.INTERNAL_WAVE_PERTURBATION: (bump_channel_width, bump_channel_bottom, (0.0, 2.0)),
    ScenarioName.LOCK_EXCHANGE: (bump_channel_width, bump_channel_bottom, (0.0, 2.0)),
    ScenarioName.GRAVITY_CURRENT: (bump_channel_width, bump_channel_bottom, (0.0, 2.0)),
}


def build_geometry(name: ScenarioName, config: SimulationConfig) -> ChannelGeometry:
    width_fn, bottom_fn, domain = _CHANNELS[name]
    if config.geometry_file is not None:
        return load_tabulated_channel(config.geometry_file, x_start=domain[0])
    return build_channel(
        width_fn, bottom_fn, domain, config.n_cells, config.scheme.dz, config.z_top
    )


def state_from_elevations(
    geometry: ChannelGeometry,
    w1: FloatArray,
    w2: FloatArray,
    u1: FloatArray,
    u2: FloatArray,
) -> FlowState:
    """Cell averages whose deconvolution returns the given elevations."""
    table = geometry.cell_table
    bottom = geometry.bottom_cell
    w1 = np.maximum(np.broadcast_to(w1, bottom.shape), bottom)
    w2 = np.maximum(np.broadcast_to(w2, bottom.shape), w1)
    a1 = table.area_between(bottom, w1)
    a2 = table.area_between(w1, w2)
    return FlowState(a1=a1, q1=a1 * u1, a2=a2, q2=a2 * u2)


def edge_condition(
    geometry: ChannelGeometry,
    side_row: int,
    w1: float,
    w2: float,
    u1: float = 0.0,
    u2: float = 0.0,
    mode: BoundaryMode = BoundaryMode.AUTOMATIC,
    q1: Optional[float] = None,
    q2: Optional[float] = None,
) -> BoundaryCondition:
    """Boundary data from elevations; discharges use the ghost column areas."""
    base = float(geometry.ghost_bottom[side_row])
    rows = np.array([side_row])
    w1 = max(w1, base)
    a1 = float(geometry.ghost_table.area_between(base, w1, rows)[0])
    a2 = float(geometry.ghost_table.area_between(w1, max(w2, w1), rows)[0])
    return BoundaryCondition(
        mode=mode,
        w1=w1,
        w2=max(w2, w1),
        q1=a1 * u1 if q1 is None else q1,
        q2=a2 * u2 if q2 is None else q2,
    )


def _edges_from_state(
    geometry: ChannelGeometry,
    state: FlowState,
    w1: FloatArray,
    w2: FloatArray,
    config: SimulationConfig,
) -> BoundarySpec:
    """Inflow data taken from the initial edge cells."""
    left = BoundaryCondition(
        mode=config.left_boundary, w1=float(w1[0]), w2=float(w2[0]),
        q1=float(state.q1[0]), q2=float(state.q2[0]),
    )
    right = BoundaryCondition(
        mode=config.right_boundary, w1=float(w1[-1]), w2=float(w2[-1]),
        q1=float(state.q1[-1]), q2=float(state.q2[-1]),
    )
    return BoundarySpec(left=left, right=right)


def _riemann(geometry: ChannelGeometry, config: SimulationConfig) -> Tuple[FlowState, BoundarySpec]:
    x = geometry.x_cells
    left = x <= 0.2
    state = FlowState(
        a1=np.where(left, 0.5, 0.55),
        q1=np.where(left, 1.25, 1.375),
        a2=np.where(left, 0.5, 0.45),
        q2=np.where(left, 1.25, 1.125),
    )
    table, bottom = geometry.cell_table, geometry.bottom_cell
    w1 = table.invert_area(bottom, state.a1)
    w2 = table.invert_area(bottom, state.a1 + state.a2)
    return state, _edges_from_state(geometry, state, w1, w2, config)


def _rest_perturbation(
    geometry: ChannelGeometry, config: SimulationConfig
) -> Tuple[FlowState, BoundarySpec]:
    x = geometry.x_cells
    w1 = np.full_like(x, 0.7)
    w2 = np.where((x >= 0.1) & (x <= 0.2), 1.2 + config.perturbation, 1.2)
    state = state_from_elevations(geometry, w1, w2, 0.0, 0.0)
    return state, _edges_from_state(geometry, state, w1, w2, config)


def _internal_wave(
    geometry: ChannelGeometry, config: SimulationConfig
) -> Tuple[FlowState, BoundarySpec]:
    x = geometry.x_cells
    bump = (x >= 0.1) & (x <= 0.2)
    w1 = np.where(bump, 0.9 + config.perturbation, 0.9)
    w2 = np.full_like(x, 1.5)
    state = state_from_elevations(geometry, w1, w2, 0.3, 0.0)
    left = edge_condition(geometry, 0, 0.9, 1.5, u1=0.3, mode=config.left_boundary)
    right = edge_condition(
        geometry, geometry.n_cells + 1, 0.9, 1.5, u1=0.3, mode=config.right_boundary
    )
    return state, BoundarySpec(left=left, right=right)


def _lock_exchange(
    geometry: ChannelGeometry, config: SimulationConfig
) -> Tuple[FlowState, BoundarySpec]:
    x = geometry.x_cells
    delta_B = config.scheme.delta_B
    light = x <= 0.75
    w1 = np.where(light, geometry.bottom_cell + delta_B, 1.5)
    w2 = np.where(light, 1.5, 1.5 + delta_B)
    state = state_from_elevations(geometry, w1, w2, 0.0, 0.0)
    return state, _edges_from_state(geometry, state, w1, w2, config)


def _gravity_current(
    geometry: ChannelGeometry, config: SimulationConfig
) -> Tuple[FlowState, BoundarySpec]:
    w1 = geometry.bottom_cell + config.scheme.delta_B
    w2 = np.full_like(w1, 1.5)
    state = state_from_elevations(geometry, w1, w2, 0.0, 0.0)
    edges = _edges_from_state(geometry, state, w1, w2, config)
    left = BoundaryCondition(mode=config.left_boundary, w1=0.6, w2=1.5, q1=0.1, q2=0.0)
    return state, BoundarySpec(left=left, right=edges.right)


_BUILDERS = {
    ScenarioName.RIEMANN: _riemann,
    ScenarioName.REST_PERTURBATION: _rest_perturbation,
    ScenarioName.INTERNAL_WAVE: _internal_wave,
    ScenarioName.INTERNAL_WAVE_PERTURBATION: _internal_wave,
    ScenarioName.LOCK_EXCHANGE: _lock_exchange,
    ScenarioName.GRAVITY_CURRENT: _gravity_current,
}


def build_scenario(name: Union[ScenarioName, str], config: SimulationConfig) -> Scenario:
    """Geometry, initial state, boundary data and parameters for a named experiment."""
    try:
        scenario = ScenarioName(name)
    except ValueError:
        valid = [s.value for s in ScenarioName]
        raise ConfigurationError(f"Unknown scenario {name!r}. Valid scenarios: {valid}", "scenario")
    geometry = build_geometry(scenario, config)
    state, boundary = _BUILDERS[scenario](geometry, config)
    logger.info(
        f"Built scenario {scenario.value}: {geometry.n_cells} cells on "
        f"[{geometry.x_interfaces[0]}, {geometry.x_interfaces[-1]}]"
    )
    return Scenario(
        name=scenario,
        geometry=geometry,
        state=state,
        boundary=boundary,
        physics=config.physics,
        scheme=config.scheme,
    )
