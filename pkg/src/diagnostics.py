"""Run-time diagnostics: invariants, entropy, mass, hyperbolicity and convergence norms."""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import logging

import numpy as np

from src.config.constants import ENTROPY_SOFT_TOL, LOGGER_NAME
from src.config.settings import PhysicalParams
from src.eigen import hyperbolicity_ok
from src.geometry import ChannelGeometry, width_x_integrals
from src.state import DerivedCellState, FlowState, pressure_terms
from src.types import FloatArray, IntArray

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.diagnostics")


@dataclass(frozen=True, eq=False)
class DiagnosticsRecord:
    time: float
    mass1: float
    mass2: float
    max_u1: float
    max_u2: float
    max_du: float
    q1: FloatArray
    q2: FloatArray
    e1: FloatArray
    e2: FloatArray
    entropy_total: float
    entropy_flux_left: float
    entropy_flux_right: float
    hyperbolic_loss_cells: Tuple[int, ...] = field(default_factory=tuple)

    def csv_row(self) -> List[float]:
        return [
            self.time,
            self.mass1,
            self.mass2,
            self.max_u1,
            self.max_u2,
            self.max_du,
            self.entropy_total,
            float(len(self.hyperbolic_loss_cells)),
        ]


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Cell-averaged fields on a grid described by its interface abscissae."""

    x_interfaces: FloatArray
    fields: Mapping[str, FloatArray]
    time: float = 0.0

    @property
    def x_cells(self) -> FloatArray:
        return 0.5 * (self.x_interfaces[1:] + self.x_interfaces[:-1])


def steady_invariants(
    state: FlowState, derived: DerivedCellState, params: PhysicalParams
) -> Tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """Per-cell Q1, Q2, E1 = u1^2/2 + g w2_hat and E2 = u2^2/2 + g w2."""
    e1 = 0.5 * derived.u1**2 + params.g * derived.w2_hat
    e2 = 0.5 * derived.u2**2 + params.g * derived.w2
    return np.asarray(state.q1), np.asarray(state.q2), e1, e2


def entropy(
    state: FlowState,
    derived: DerivedCellState,
    pressures: Tuple[FloatArray, FloatArray],
    params: PhysicalParams,
) -> Tuple[FloatArray, FloatArray]:
    """Entropy density and entropy flux per cell."""
    p1, p2 = pressures
    _, _, e1, e2 = steady_invariants(state, derived, params)
    layer1 = state.a1 * e1 - p1
    layer2 = state.a2 * e2 - p2
    density = layer1 + params.r * layer2
    flux = derived.u1 * (layer1 + p1) + params.r * derived.u2 * (layer2 + p2)
    return density, flux


def entropy_production(
    previous: DiagnosticsRecord, current: DiagnosticsRecord
) -> float:
    """Discrete d/dt of total entropy plus the net boundary entropy outflow.

    Boundary fluxes are averaged between the two records.  Non-positive up to
    roundoff for entropy-admissible evolutions.
    """
    dt = current.time - previous.time
    if dt <= 0.0:
        return 0.0
    outflow = 0.5 * (
        (previous.entropy_flux_right - previous.entropy_flux_left)
        + (current.entropy_flux_right - current.entropy_flux_left)
    )
    return (current.entropy_total - previous.entropy_total) / dt + outflow


def check_entropy(previous: DiagnosticsRecord, current: DiagnosticsRecord) -> float:
    """Log a warning when entropy production exceeds the soft threshold."""
    production = entropy_production(previous, current)
    scale = max(abs(current.entropy_total), 1.0)
    if production > ENTROPY_SOFT_TOL * scale:
        logger.warning(
            f"Entropy production {production:.3e} above tolerance at t={current.time:.6g}"
        )
    return production


def hyperbolic_loss_cells(
    state: FlowState, derived: DerivedCellState, params: PhysicalParams
) -> IntArray:
    ok = np.asarray(
        hyperbolicity_ok(
            derived.u1, derived.u2, derived.c1, derived.c2, state.a1, derived.sigma1, params
        )
    )
    return np.flatnonzero(~ok)


def make_record(
    state: FlowState,
    derived: DerivedCellState,
    geometry: ChannelGeometry,
    params: PhysicalParams,
) -> DiagnosticsRecord:
    q1, q2, e1, e2 = steady_invariants(state, derived, params)
    density, flux = entropy(state, derived, pressure_terms(derived, geometry, params), params)
    dx = geometry.dx
    return DiagnosticsRecord(
        time=state.time,
        mass1=float(np.sum(state.a1) * dx),
        mass2=float(np.sum(state.a2) * dx),
        max_u1=float(np.max(np.abs(derived.u1))),
        max_u2=float(np.max(np.abs(derived.u2))),
        max_du=float(np.max(np.abs(derived.u2 - derived.u1))),
        q1=q1,
        q2=q2,
        e1=e1,
        e2=e2,
        entropy_total=float(np.sum(density) * dx),
        entropy_flux_left=float(flux[0]),
        entropy_flux_right=float(flux[-1]),
        hyperbolic_loss_cells=tuple(int(j) for j in hyperbolic_loss_cells(state, derived, params)),
    )


def jump_filtered_variation(values: FloatArray, threshold: float) -> float:
    """Total variation ignoring single differences larger than ``threshold``."""
    steps = np.abs(np.diff(values))
    return float(np.sum(steps[steps <= threshold]))


def internal_wave_residual(
    state: FlowState,
    derived: DerivedCellState,
    params: PhysicalParams,
    e1_ref: float,
    q1_ref: float,
    w2_ref: float,
    exclude: Optional[Sequence[int]] = None,
    velocity_tol: float = 1e-6,
) -> Dict[str, float]:
    """Residual norms of a steady internal wave under a flat free surface.

    The cubic g(1-r)h1^3 + (g(1-r)B + g r w2 - E1) h1^2 + q^2/2 uses the
    per-unit-width discharge q = u1 h1 of each cell.
    """
    keep = np.ones(state.n_cells, dtype=bool)
    if exclude is not None and len(exclude):
        keep[np.asarray(list(exclude), dtype=np.intp)] = False
    g, r = params.g, params.r
    h1 = derived.h1
    q_unit = derived.u1 * h1
    cubic = (
        g * (1.0 - r) * h1**3
        + (g * (1.0 - r) * derived.bottom + g * r * derived.w2 - e1_ref) * h1**2
        + 0.5 * q_unit**2
    )
    _, _, e1, e2 = steady_invariants(state, derived, params)
    q_scale = max(abs(q1_ref), 1e-300)
    result = {
        "cubic": float(np.max(np.abs(cubic[keep]))) if np.any(keep) else 0.0,
        "w2_flatness": float(np.max(np.abs(derived.w2 - w2_ref))),
        "q1_relative": float(np.max(np.abs(state.q1[keep] - q1_ref))) / q_scale if np.any(keep) else 0.0,
        "e1_relative": float(np.max(np.abs(e1[keep] - e1_ref))) / abs(e1_ref) if np.any(keep) else 0.0,
        "e2_variation": jump_filtered_variation(e2, threshold=1e-2 * abs(float(np.mean(e2)))),
        "max_u2": float(np.max(np.abs(derived.u2))),
    }
    result["is_internal_wave"] = float(result["max_u2"] <= velocity_tol)
    return result


def restrict(reference: Snapshot, x_interfaces: FloatArray) -> Dict[str, FloatArray]:
    """Piecewise-constant restriction of ``reference`` onto coarser cells."""
    if np.array_equal(x_interfaces, reference.x_interfaces):
        return {name: np.array(values, dtype=np.float64) for name, values in reference.fields.items()}
    widths = np.diff(x_interfaces)
    restricted = {}
    for name, values in reference.fields.items():
        cumulative = np.concatenate([[0.0], np.cumsum(values * np.diff(reference.x_interfaces))])
        at_edges = np.interp(x_interfaces, reference.x_interfaces, cumulative)
        restricted[name] = np.diff(at_edges) / widths
    return restricted


def convergence_norms(
    coarse: Snapshot, reference: Snapshot, names: Optional[Sequence[str]] = None
) -> Dict[str, float]:
    """L1 error of each field against the restricted reference."""
    restricted = restrict(reference, coarse.x_interfaces)
    dx = np.diff(coarse.x_interfaces)
    keys = list(names) if names is not None else list(coarse.fields)
    return {
        name: float(np.sum(np.abs(coarse.fields[name] - restricted[name]) * dx))
        for name in keys
    }


def locate_jumps(x: FloatArray, values: FloatArray, threshold: float) -> FloatArray:
    """Positions of discontinuities: runs of large differences merged into one jump.

    Each jump is located at the midpoint of its run of steep cells.
    """
    steep = np.abs(np.diff(values)) > threshold
    if not np.any(steep):
        return np.zeros(0)
    midpoints = 0.5 * (x[1:] + x[:-1])
    edges = np.diff(steep.astype(np.int8))
    starts = list(np.flatnonzero(edges == 1) + 1)
    ends = list(np.flatnonzero(edges == -1))
    if steep[0]:
        starts.insert(0, 0)
    if steep[-1]:
        ends.append(steep.size - 1)
    return np.array([0.5 * (midpoints[s] + midpoints[e]) for s, e in zip(starts, ends)])


def locate_waves(
    snapshot: Snapshot,
    names: Sequence[str] = ("w1", "w2", "u1", "u2"),
    relative_threshold: float = 0.1,
    merge_distance: Optional[float] = None,
) -> FloatArray:
    """Jump positions found in any of ``names``, merged across fields.

    A cell pair is steep when its difference exceeds ``relative_threshold`` times
    the largest difference of that field. Positions closer than ``merge_distance``
    (default five cells) are reported once, at their mean.
    """
    x = snapshot.x_cells
    if merge_distance is None:
        merge_distance = 5.0 * float(np.max(np.diff(snapshot.x_interfaces)))
    found: List[float] = []
    for name in names:
        values = np.asarray(snapshot.fields[name], dtype=np.float64)
        largest = float(np.max(np.abs(np.diff(values)), initial=0.0))
        if largest > 0.0:
            found.extend(locate_jumps(x, values, relative_threshold * largest))
    if not found:
        return np.zeros(0)
    ordered = np.sort(np.asarray(found))
    groups = np.split(ordered, np.flatnonzero(np.diff(ordered) > merge_distance) + 1)
    return np.array([float(g.mean()) for g in groups])


def quasilinear_source(
    geometry: ChannelGeometry, derived: DerivedCellState
) -> Tuple[FloatArray, FloatArray]:
    """Geometric source parts c1^2 (I3 - sigma_B B') and c2^2 (I4 - sigma_B B')."""
    cells = np.arange(geometry.n_cells)
    _, _, i3, i4 = width_x_integrals(geometry, cells, derived.w1, derived.w2)
    slope = np.diff(geometry.bottom_interface) / geometry.dx
    bottom_term = geometry.bottom_width_cell * slope
    return derived.c1**2 * (i3 - bottom_term), derived.c2**2 * (i4 - bottom_term)
