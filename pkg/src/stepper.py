"""Semi-discrete right-hand side, CFL time step, boundaries and SSP-RK2."""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple
import logging

import numpy as np

from src.config.constants import (
    CONSERVATION_TOL,
    ENTRAINMENT_MIN_AREA,
    FRICTION_CFL_FACTOR,
    LOGGER_NAME,
    POSITIVITY_ROUNDOFF,
    BoundaryMode,
    Side,
)
from src.config.settings import PhysicalParams, SchemeParams
from src.eigen import composite_froude, eigenvalue_bounds, hyperbolicity_ok
from src.flux_sources import (
    SourceTerms,
    cell_hydraulic_radius,
    entrainment_source,
    entrainment_velocity,
    friction_source,
    interface_fluxes,
    pressure_exchange_source,
)
from src.geometry import ChannelGeometry
from src.reconstruction import GhostedFields, InterfaceData, reconstruct_interfaces
from src.state import DerivedCellState, FlowState, derive_cells
from src.types import (
    ConfigurationError,
    ConservationError,
    FloatArray,
    GeometryError,
    PositivityError,
)

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.stepper")


@dataclass(frozen=True)
class BoundaryCondition:
    """Prescribed inflow data and classification mode for one side."""

    mode: BoundaryMode = BoundaryMode.AUTOMATIC
    w1: Optional[float] = None
    w2: Optional[float] = None
    q1: float = 0.0
    q2: float = 0.0

    def __post_init__(self) -> None:
        if (self.w1 is None) != (self.w2 is None):
            raise ConfigurationError("inflow data needs both w1 and w2")
        if self.w1 is not None and self.w2 is not None and self.w2 < self.w1:
            raise ConfigurationError(
                f"prescribed w2={self.w2} below prescribed w1={self.w1}"
            )
        if self.mode is BoundaryMode.INFLOW and self.w1 is None:
            raise ConfigurationError("forced inflow boundary needs prescribed values")

    @property
    def has_inflow_data(self) -> bool:
        return self.w1 is not None


@dataclass(frozen=True)
class BoundarySpec:
    left: BoundaryCondition = BoundaryCondition()
    right: BoundaryCondition = BoundaryCondition()

    def side(self, side: Side) -> BoundaryCondition:
        return self.left if side is Side.LEFT else self.right


@dataclass(frozen=True, eq=False)
class StepReport:
    """Summary of one time step."""

    dt: float
    cfl: float
    tau_e: float
    tau_f: float
    max_speed: float
    area_ratio: float
    min_a1: float
    min_a2: float
    hyperbolic_loss_count: int
    rhs_norm: float = 0.0
    time: float = 0.0
    dt_fallback: bool = False
    dry_cells_skipped: int = 0
    boundary_mass_flux: Tuple[float, float] = (0.0, 0.0)
    hyperbolic_loss_cells: Tuple[int, ...] = field(default_factory=tuple)


@dataclass(frozen=True, eq=False)
class RhsEvaluation:
    """Everything produced by one right-hand-side evaluation."""

    tendency: FloatArray
    derived: DerivedCellState
    ghosted: GhostedFields
    interfaces: InterfaceData
    fluxes: FloatArray
    sources: SourceTerms
    entrainment_velocity: FloatArray


def _classify(
    condition: BoundaryCondition,
    side: Side,
    derived: DerivedCellState,
    state: FlowState,
    params: PhysicalParams,
) -> bool:
    """True when the side is an inflow boundary."""
    if condition.mode is BoundaryMode.INFLOW:
        return True
    if condition.mode is BoundaryMode.OUTFLOW:
        return False
    j = 0 if side is Side.LEFT else -1
    g1m, g1p, g2m, g2p = eigenvalue_bounds(
        derived.u1[j], derived.u2[j], derived.c2[j], state.a1[j],
        derived.sigma1[j], derived.sigma2[j], params,
    )
    if side is Side.LEFT:
        outflow = g1m < 0.0 and g2m < 0.0
    else:
        outflow = g1p > 0.0 and g2p > 0.0
    return not outflow and condition.has_inflow_data


def apply_boundaries(
    state: FlowState,
    derived: DerivedCellState,
    geometry: ChannelGeometry,
    spec: BoundarySpec,
    params: PhysicalParams,
) -> GhostedFields:
    """Extend the cell data by one ghost cell per side.

    Outflow copies (w1, w2, Q1, Q2) of the edge cell, inflow uses the
    prescribed values.  Ghost areas come from the boundary interface column.
    Sides without prescribed data are always treated as outflow.
    """
    ghost_bottom = geometry.ghost_bottom
    values = {}
    inflow = {}
    for side, j, row in ((Side.LEFT, 0, 0), (Side.RIGHT, -1, geometry.n_cells + 1)):
        condition = spec.side(side)
        is_inflow = _classify(condition, side, derived, state, params)
        kind = "inflow" if is_inflow else "outflow"
        logger.debug(f"{side.value} boundary: {kind} ({condition.mode.value})")
        if is_inflow:
            w1, w2 = float(condition.w1), float(condition.w2)  # type: ignore[arg-type]
            q1, q2 = condition.q1, condition.q2
        else:
            w1, w2 = float(derived.w1[j]), float(derived.w2[j])
            q1, q2 = float(state.q1[j]), float(state.q2[j])
        base = float(ghost_bottom[row])
        if is_inflow and w1 < base - 1e-12:
            raise GeometryError(
                f"{side.value} inflow w1={w1} below the bottom {base}", z=w1
            )
        w1 = max(w1, base)
        w2 = max(w2, w1)
        below = geometry.ghost_table.area_below(np.array([base, w1, w2]), np.full(3, row))
        a1 = max(float(below[1] - below[0]), 0.0)
        a2 = max(float(below[2] - below[1]), 0.0)
        values[side] = (a1, q1, a2, q2, w1, w2)
        inflow[side] = is_inflow

    def extend(k: int, interior: FloatArray) -> FloatArray:
        return np.concatenate([[values[Side.LEFT][k]], interior, [values[Side.RIGHT][k]]])

    return GhostedFields(
        a1=extend(0, state.a1),
        q1=extend(1, state.q1),
        a2=extend(2, state.a2),
        q2=extend(3, state.q2),
        w1=extend(4, derived.w1),
        w2=extend(5, derived.w2),
        left_inflow=inflow[Side.LEFT],
        right_inflow=inflow[Side.RIGHT],
    )


def evaluate_rhs(
    state: FlowState,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
    boundary_spec: BoundarySpec,
    well_balanced: Optional[bool] = None,
) -> RhsEvaluation:
    """Ghost fill, derive, reconstruct, fluxes, sources and assembly."""
    derived = derive_cells(state, geometry, params, scheme.delta_A)
    ghosted = apply_boundaries(state, derived, geometry, boundary_spec, params)
    interfaces = reconstruct_interfaces(ghosted, geometry, params, scheme, well_balanced)
    fluxes = interface_fluxes(interfaces, params)

    n = geometry.n_cells
    sources = SourceTerms.zeros(n)
    s_q1, s_q2 = pressure_exchange_source(
        interfaces, derived.w2_hat, derived.w2, geometry.dx, params
    )
    sources = sources + SourceTerms(np.zeros(n), s_q1, np.zeros(n), s_q2)
    if params.friction_enabled:
        radius = cell_hydraulic_radius(geometry, state.a1, state.a2, derived.w2)
        f_q1, f_q2 = friction_source(
            state.a1, state.q1, state.a2, state.q2, derived.u1, derived.u2,
            radius, params, scheme.delta_A,
        )
        sources = sources + SourceTerms(np.zeros(n), f_q1, np.zeros(n), f_q2)
    v_e = np.zeros(n)
    if params.entrainment_enabled:
        g2 = composite_froude(
            derived.u1, derived.u2, derived.c1, derived.c2, state.a1, derived.sigma1, params
        )
        v_e = np.asarray(entrainment_velocity(g2, derived.u1, params))
        sources = sources + entrainment_source(
            state.a1, state.a2, derived.u1, derived.u2, derived.sigma1, g2, params
        )
    tendency = -(fluxes[:, 1:] - fluxes[:, :-1]) / geometry.dx + sources.as_array()
    return RhsEvaluation(
        tendency=tendency,
        derived=derived,
        ghosted=ghosted,
        interfaces=interfaces,
        fluxes=fluxes,
        sources=sources,
        entrainment_velocity=v_e,
    )


def rhs(
    state: FlowState,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
    boundary_spec: BoundarySpec,
    well_balanced: Optional[bool] = None,
) -> FloatArray:
    """The (4, N) tendency C[W] = -(H_{j+1/2} - H_{j-1/2})/dx + S_j."""
    return evaluate_rhs(state, geometry, params, scheme, boundary_spec, well_balanced).tendency


def compute_dt(
    state: FlowState,
    evaluation: RhsEvaluation,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
) -> Tuple[float, StepReport]:
    """CFL step dt = nu / max((a/dx) ratio + tau_e, 5 tau_f)."""
    interfaces = evaluation.interfaces
    derived = evaluation.derived
    a_max = interfaces.speeds.max_speed
    dry_floor = scheme.delta_A**0.25

    # near-dry cells have their edge areas capped at twice the mean during
    # reconstruction, so they need a ratio of at most one
    ratio = 1.0
    skipped = 0
    for mean, right_edge, left_edge in (
        (state.a1, interfaces.left.a1[1:], interfaces.right.a1[:-1]),
        (state.a2, interfaces.left.a2[1:], interfaces.right.a2[:-1]),
    ):
        wet = mean >= dry_floor
        skipped += int(np.count_nonzero(~wet))
        if np.any(wet):
            ratio = max(ratio, float(np.max((right_edge[wet] + left_edge[wet]) / (2.0 * mean[wet]))))

    tau_e = 0.0
    if params.entrainment_enabled:
        rate = evaluation.entrainment_velocity / derived.sigma1
        active = state.a2 > ENTRAINMENT_MIN_AREA
        if np.any(active):
            cross = state.a1[active] / state.a2[active] * rate[active]
            tau_e = min(0.0, float(np.min(rate[active])), float(np.min(cross)))

    tau_f = 0.0
    if params.friction_enabled:
        total = state.a1 + state.a2
        wet = total >= dry_floor
        if np.any(wet):
            radius = cell_hydraulic_radius(geometry, state.a1, state.a2, derived.w2)
            flux = np.abs((state.q1 * state.a1 + state.q2 * state.a2)[wet] / total[wet] ** 2)
            n_max = max(params.n_i, params.n_b)
            tau_f = params.r * params.g * n_max**2 * float(
                np.max(flux / radius[wet] ** (4.0 / 3.0))
            )

    denominator = max(a_max / geometry.dx * ratio + tau_e, FRICTION_CFL_FACTOR * tau_f)
    fallback = denominator <= 0.0
    if fallback:
        dt = scheme.nu * geometry.dx
        logger.warning(f"No wave speed at t={state.time:.6g}; using fallback dt={dt:.3e}")
    else:
        dt = scheme.nu / denominator

    loss = ~np.asarray(
        hyperbolicity_ok(
            derived.u1, derived.u2, derived.c1, derived.c2, state.a1, derived.sigma1, params
        )
    )
    loss_cells = tuple(int(j) for j in np.flatnonzero(loss))
    report = StepReport(
        dt=dt,
        cfl=scheme.nu if not fallback else 0.0,
        tau_e=tau_e,
        tau_f=tau_f,
        max_speed=a_max,
        area_ratio=ratio,
        min_a1=float(state.a1.min()),
        min_a2=float(state.a2.min()),
        hyperbolic_loss_count=len(loss_cells),
        rhs_norm=float(np.max(np.abs(evaluation.tendency))),
        time=state.time,
        dt_fallback=fallback,
        dry_cells_skipped=skipped,
        hyperbolic_loss_cells=loss_cells,
    )
    return dt, report


def ssprk2_update(
    values: FloatArray,
    dt: float,
    operator: Callable[[FloatArray, int], FloatArray],
    after_stage: Optional[Callable[[FloatArray, int], FloatArray]] = None,
) -> FloatArray:
    """Heun-form SSP-RK2: W1 = W + dt C[W]; W2 = (W + W1 + dt C[W1]) / 2."""
    stage1 = values + dt * operator(values, 1)
    if after_stage is not None:
        stage1 = after_stage(stage1, 1)
    stage2 = 0.5 * values + 0.5 * (stage1 + dt * operator(stage1, 2))
    if after_stage is not None:
        stage2 = after_stage(stage2, 2)
    return stage2


def enforce_positivity(values: FloatArray, stage: int, time: float) -> FloatArray:
    """Clamp roundoff-level negative areas, raise on genuine negatives."""
    areas = values[[0, 2]]
    negative = areas < 0.0
    if not np.any(negative):
        return values
    worst = float(areas.min())
    scale = max(1.0, float(np.max(np.abs(areas))))
    if worst < -POSITIVITY_ROUNDOFF * scale:
        layer, cell = np.unravel_index(int(np.argmin(areas)), areas.shape)
        raise PositivityError(
            f"negative area {worst:.3e} in layer {layer + 1}, cell {cell} after stage {stage}",
            cell=int(cell),
            stage=stage,
            time=time,
        )
    logger.debug(f"Clamping {int(np.count_nonzero(negative))} roundoff-negative areas")
    clamped = values.copy()
    clamped[[0, 2]] = np.maximum(areas, 0.0)
    return clamped


def step_ssprk2(
    state: FlowState,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
    boundary_spec: BoundarySpec,
    dt: Optional[float] = None,
    dt_max: Optional[float] = None,
    check_conservation: bool = False,
) -> Tuple[FlowState, StepReport]:
    """Advance one SSP-RK2 step; dt comes from :func:`compute_dt` unless given."""
    first = evaluate_rhs(state, geometry, params, scheme, boundary_spec)
    cfl_dt, report = compute_dt(state, first, geometry, params, scheme)
    step = cfl_dt if dt is None else dt
    if dt_max is not None:
        step = min(step, dt_max)
    if step <= 0.0:
        raise ValueError(f"time step must be positive, got {step}")

    boundary_fluxes = [first.fluxes[[0, 2]][:, [0, -1]]]

    def operator(values: FloatArray, stage: int) -> FloatArray:
        if stage == 1:
            return first.tendency
        stage_state = FlowState.from_array(values, state.time + step)
        evaluation = evaluate_rhs(stage_state, geometry, params, scheme, boundary_spec)
        boundary_fluxes.append(evaluation.fluxes[[0, 2]][:, [0, -1]])
        return evaluation.tendency

    new_values = ssprk2_update(
        state.as_array(),
        step,
        operator,
        lambda values, stage: enforce_positivity(values, stage, state.time),
    )
    new_state = FlowState.from_array(new_values, state.time + step)

    faces = 0.5 * (boundary_fluxes[0] + boundary_fluxes[1])
    inflow = step * (faces[:, 0] - faces[:, 1])
    if check_conservation and not params.entrainment_enabled:
        check_mass_balance(state, new_state, geometry, inflow)
    report = replace(
        report,
        dt=step,
        cfl=report.cfl * step / cfl_dt if cfl_dt > 0 else report.cfl,
        boundary_mass_flux=(float(inflow[0]), float(inflow[1])),
    )
    return new_state, report


def check_mass_balance(
    old: FlowState, new: FlowState, geometry: ChannelGeometry, inflow: FloatArray
) -> None:
    """Interior mass change of each layer must equal the net boundary inflow."""
    for layer, (before, after) in enumerate(((old.a1, new.a1), (old.a2, new.a2))):
        change = float(np.sum(after - before)) * geometry.dx
        total = max(float(np.sum(after)) * geometry.dx, float(np.sum(before)) * geometry.dx, 1e-300)
        if abs(change - float(inflow[layer])) > CONSERVATION_TOL * max(total, abs(float(inflow[layer]))):
            raise ConservationError(
                f"layer {layer + 1}: mass change {change:.17g} differs from "
                f"boundary inflow {float(inflow[layer]):.17g}",
                layer=layer + 1,
                time=new.time,
            )
