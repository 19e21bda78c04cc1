"""Conserved cell averages and the quantities derived from them."""

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union
import logging

import numpy as np

from src.config.constants import LOGGER_NAME
from src.config.settings import PhysicalParams
from src.eigen import sound_speeds
from src.geometry import ChannelGeometry
from src.reconstruction import regularize_velocity
from src.types import ArrayLike, FloatArray, GeometryError, IntArray

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.state")


@dataclass(frozen=True, eq=False)
class FlowState:
    """Cell averages W = (A1, Q1, A2, Q2) at one time level."""

    a1: FloatArray
    q1: FloatArray
    a2: FloatArray
    q2: FloatArray
    time: float = 0.0

    def __post_init__(self) -> None:
        arrays = [np.array(getattr(self, name), dtype=np.float64) for name in ("a1", "q1", "a2", "q2")]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
            raise ValueError(
                f"a1, q1, a2, q2 must be 1-D arrays of equal length, got {[a.shape for a in arrays]}"
            )
        for name, value in zip(("a1", "q1", "a2", "q2"), arrays):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_cells(self) -> int:
        return int(self.a1.size)

    def as_array(self) -> FloatArray:
        """The (4, N) array of conserved variables."""
        return np.vstack([self.a1, self.q1, self.a2, self.q2])

    @classmethod
    def from_array(cls, values: FloatArray, time: float = 0.0) -> "FlowState":
        return cls(a1=values[0], q1=values[1], a2=values[2], q2=values[3], time=time)

    def with_time(self, time: float) -> "FlowState":
        return replace(self, time=time)


@dataclass(frozen=True, eq=False)
class DerivedCellState:
    """Elevations, depths, velocities, widths and sound speeds per cell."""

    w1: FloatArray
    w2: FloatArray
    w2_hat: FloatArray
    h1: FloatArray
    h2: FloatArray
    u1: FloatArray
    u2: FloatArray
    sigma1: FloatArray
    sigma2: FloatArray
    c1: FloatArray
    c2: FloatArray
    bottom: FloatArray = field(default_factory=lambda: np.zeros(0))

    def cell(self, j: int) -> "DerivedCellState":
        """Single-cell view (arrays of length one)."""
        sl = slice(j, j + 1)
        return DerivedCellState(
            **{name: getattr(self, name)[sl] for name in self.__dataclass_fields__}
        )


def derive_cells(
    state: FlowState,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    delta_A: float,
) -> DerivedCellState:
    """Deconvolve all cell averages into elevations and derived quantities."""
    if state.n_cells != geometry.n_cells:
        raise ValueError(
            f"state has {state.n_cells} cells, geometry has {geometry.n_cells}"
        )
    if np.any(state.a1 < 0.0) or np.any(state.a2 < 0.0):
        raise GeometryError("cell areas must be non-negative")
    table = geometry.cell_table
    bottom = geometry.bottom_cell
    n = geometry.n_cells
    floor = geometry.floor_area_cell
    # both interfaces in one inversion and one width lookup
    rows = np.concatenate([np.arange(n), np.arange(n)])
    levels = table.invert_area(
        np.concatenate([bottom, bottom]),
        np.concatenate([state.a1, state.a1 + state.a2]),
        rows,
        base_area=np.concatenate([floor, floor]),
    )
    w1 = levels[:n]
    w2 = np.maximum(levels[n:], w1)
    sigma = table.width_at(np.concatenate([w1, w2]), rows)
    return _derived_from_elevations(
        state.a1, state.q1, state.a2, state.q2, w1, w2, bottom,
        sigma[:n], sigma[n:], params, delta_A,
    )


def derive_cell(
    state: FlowState,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    j: int,
    delta_A: float,
) -> DerivedCellState:
    """Derived quantities of cell ``j`` only."""
    if not 0 <= j < geometry.n_cells:
        raise IndexError(f"cell {j} outside [0, {geometry.n_cells})")
    rows = np.array([j])
    table = geometry.cell_table
    bottom = geometry.bottom_cell[rows]
    a1, a2 = state.a1[rows], state.a2[rows]
    w1 = table.invert_area(bottom, a1, rows)
    w2 = np.maximum(table.invert_area(bottom, a1 + a2, rows), w1)
    return _derived_from_elevations(
        a1, state.q1[rows], a2, state.q2[rows], w1, w2, bottom,
        table.width_at(w1, rows), table.width_at(w2, rows), params, delta_A,
    )


def _derived_from_elevations(
    a1: FloatArray,
    q1: FloatArray,
    a2: FloatArray,
    q2: FloatArray,
    w1: FloatArray,
    w2: FloatArray,
    bottom: FloatArray,
    sigma1: FloatArray,
    sigma2: FloatArray,
    params: PhysicalParams,
    delta_A: float,
) -> DerivedCellState:
    h1 = w1 - bottom
    h2 = w2 - w1
    c1, c2 = sound_speeds(a1, a2, sigma1, sigma2, params)
    return DerivedCellState(
        w1=w1,
        w2=w2,
        w2_hat=w1 + params.r * h2,
        h1=h1,
        h2=h2,
        u1=np.asarray(regularize_velocity(q1, a1, delta_A)),
        u2=np.asarray(regularize_velocity(q2, a2, delta_A)),
        sigma1=sigma1,
        sigma2=sigma2,
        c1=np.atleast_1d(c1),
        c2=np.atleast_1d(c2),
        bottom=bottom,
    )


def pressure_terms(
    derived: DerivedCellState,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    j: Optional[Union[int, IntArray]] = None,
) -> Tuple[ArrayLike, ArrayLike]:
    """Hydrostatic pressure integrals (p1, p2) over the cell columns.

    p2 = g int_{w1}^{w2} (w2 - z) sigma dz,
    p1 = g int_{B}^{w1} (w1 + r h2 - z) sigma dz.
    """
    rows = np.arange(geometry.n_cells) if j is None else np.atleast_1d(np.asarray(j, dtype=np.intp))
    bottom = geometry.bottom_cell[rows]
    if derived.w1.size == geometry.n_cells:
        w1, w2 = derived.w1[rows], derived.w2[rows]
    else:
        w1, w2 = derived.w1, derived.w2
    table = geometry.cell_table
    area_b = table.area_below(bottom, rows)
    area_1 = table.area_below(w1, rows)
    area_2 = table.area_below(w2, rows)
    mom_b = table.moment_below(bottom, rows)
    mom_1 = table.moment_below(w1, rows)
    mom_2 = table.moment_below(w2, rows)
    g = params.g
    p2 = g * (w2 * (area_2 - area_1) - (mom_2 - mom_1))
    p1 = g * ((w1 + params.r * (w2 - w1)) * (area_1 - area_b) - (mom_1 - mom_b))
    if j is not None and np.ndim(j) == 0:
        return float(p1[0]), float(p2[0])
    return p1, p2
