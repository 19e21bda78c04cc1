"""Piecewise-linear reconstruction of interface values from cell averages."""

from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple
import logging

import numpy as np

from src.config.constants import LOGGER_NAME
from src.config.settings import PhysicalParams, SchemeParams
from src.eigen import LocalSpeeds, eigenvalue_bounds, one_sided_speeds
from src.geometry import ChannelGeometry
from src.types import ArrayLike, FloatArray

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.reconstruction")


@dataclass(frozen=True)
class GhostedFields:
    """Cell values with one ghost cell on each side (length N+2)."""

    a1: FloatArray
    q1: FloatArray
    a2: FloatArray
    q2: FloatArray
    w1: FloatArray
    w2: FloatArray
    left_inflow: bool = False
    right_inflow: bool = False


@dataclass(frozen=True)
class InterfaceSide:
    """Reconstructed point values on one side of every interface (length N+1)."""

    w1: FloatArray
    w2: FloatArray
    a1: FloatArray
    a2: FloatArray
    q1: FloatArray
    q2: FloatArray
    u1: FloatArray
    u2: FloatArray
    h1: FloatArray
    h2: FloatArray
    sigma1: FloatArray
    sigma2: FloatArray
    w2_hat: FloatArray

    def conserved(self) -> FloatArray:
        return np.vstack([self.a1, self.q1, self.a2, self.q2])


@dataclass(frozen=True)
class InterfaceData:
    """``left`` is the W^- state (from the cell on the left), ``right`` the W^+ state."""

    left: InterfaceSide
    right: InterfaceSide
    speeds: LocalSpeeds


def minmod(values: Sequence[float]) -> float:
    """Smallest value if all are positive, largest if all are negative, else zero."""
    if not values:
        raise ValueError("minmod needs at least one value")
    if all(v > 0 for v in values):
        return float(min(values))
    if all(v < 0 for v in values):
        return float(max(values))
    return 0.0


def minmod_arrays(*arrays: FloatArray) -> FloatArray:
    """Elementwise :func:`minmod` over equally shaped arrays."""
    stacked = np.vstack([np.atleast_1d(a) for a in arrays])
    positive = np.all(stacked > 0.0, axis=0)
    negative = np.all(stacked < 0.0, axis=0)
    return np.where(
        positive, stacked.min(axis=0), np.where(negative, stacked.max(axis=0), 0.0)
    )


def limited_slopes(field: ArrayLike, alpha: float, dx: float = 1.0) -> FloatArray:
    """Generalized minmod slopes; the two end cells get zero slope."""
    v = np.asarray(field, dtype=np.float64)
    slopes = np.zeros_like(v)
    if v.size < 3:
        return slopes
    backward = v[1:-1] - v[:-2]
    forward = v[2:] - v[1:-1]
    central = 0.5 * (v[2:] - v[:-2])
    slopes[1:-1] = minmod_arrays(alpha * backward, central, alpha * forward) / dx
    return slopes


def regularize_velocity(q: ArrayLike, a: ArrayLike, delta_A: float) -> ArrayLike:
    """u = sqrt(2) q a / sqrt(a^4 + max(a^4, delta_A)); exactly q/a where a^4 >= delta_A."""
    qq = np.asarray(q, dtype=np.float64)
    aa = np.asarray(a, dtype=np.float64)
    a4 = aa**4
    wet = a4 >= delta_A
    safe_a = np.where(wet, aa, 1.0)
    u = np.where(
        wet,
        qq / safe_a,
        np.sqrt(2.0) * qq * aa / np.sqrt(a4 + np.maximum(a4, delta_A)),
    )
    return float(u) if u.ndim == 0 else u


def _edges(values: FloatArray, alpha: float) -> Tuple[FloatArray, FloatArray]:
    """Left and right edge values of each cell from the limited slope."""
    half = 0.5 * limited_slopes(values, alpha)
    return values - half, values + half


def correct_positivity(
    mean: FloatArray,
    left: FloatArray,
    right: FloatArray,
    floor_left: FloatArray,
    floor_right: FloatArray,
    delta_B: float,
) -> Tuple[FloatArray, FloatArray]:
    """Lift edge values below their floors to ``floor + delta_B``.

    The opposite edge is moved so the cell mean is kept.  When both edges
    still violate, the cell is flattened at ``max(mean, max(floors) + delta_B)``.
    """
    low_left = left < floor_left
    new_left = np.where(low_left, floor_left + delta_B, left)
    new_right = np.where(low_left, 2.0 * mean - new_left, right)

    low_right = ~low_left & (new_right < floor_right)
    new_right = np.where(low_right, floor_right + delta_B, new_right)
    new_left = np.where(low_right, 2.0 * mean - new_right, new_left)

    both = (new_left < floor_left) | (new_right < floor_right)
    if np.any(both):
        logger.debug(f"Flattening {int(np.count_nonzero(both))} cells violating both edge floors")
        flat = np.maximum(mean, np.maximum(floor_left, floor_right) + delta_B)
        new_left = np.where(both, flat, new_left)
        new_right = np.where(both, flat, new_right)
    return new_left, new_right


def reconstruct_interfaces(
    fields: GhostedFields,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
    well_balanced: Optional[bool] = None,
) -> InterfaceData:
    """Interface states W^-/W^+ and one-sided speeds at all N+1 interfaces."""
    if well_balanced is None:
        well_balanced = scheme.well_balanced
    alpha, delta_B = scheme.alpha, scheme.delta_B
    b_ext = geometry.ghost_interface_bottom
    floor_left, floor_right = b_ext[:-1], b_ext[1:]
    q1_l, q1_r = _edges(fields.q1, alpha)
    q2_l, q2_r = _edges(fields.q2, alpha)

    if well_balanced:
        w1_l, w1_r = _edges(fields.w1, alpha)
        w1_l, w1_r = correct_positivity(fields.w1, w1_l, w1_r, floor_left, floor_right, delta_B)
        w2_l, w2_r = _edges(fields.w2, alpha)
        w2_l, w2_r = correct_positivity(fields.w2, w2_l, w2_r, w1_l, w1_r, delta_B)
        minus = _side_from_elevations(w1_r[:-1], w2_r[:-1], q1_r[:-1], q2_r[:-1], geometry, params, scheme)
        plus = _side_from_elevations(w1_l[1:], w2_l[1:], q1_l[1:], q2_l[1:], geometry, params, scheme)
    else:
        a1_l, a1_r = (np.maximum(e, 0.0) for e in _edges(fields.a1, alpha))
        a2_l, a2_r = (np.maximum(e, 0.0) for e in _edges(fields.a2, alpha))
        minus = _side_from_areas(a1_r[:-1], a2_r[:-1], q1_r[:-1], q2_r[:-1], geometry, params, scheme)
        plus = _side_from_areas(a1_l[1:], a2_l[1:], q1_l[1:], q2_l[1:], geometry, params, scheme)

    minus, plus = _limit_near_dry_cells(fields, minus, plus, scheme.delta_A**0.25)
    n = minus.a1.size
    both = _bounds(_stack_sides(minus, plus), params)
    speeds = one_sided_speeds(
        tuple(b[:n] for b in both), tuple(b[n:] for b in both)  # type: ignore[arg-type]
    )
    return InterfaceData(left=minus, right=plus, speeds=speeds)


def near_dry_scale(
    mean: FloatArray, left: FloatArray, right: FloatArray, dry_floor: float
) -> FloatArray:
    """Per-cell factor for the edge areas so ``left + right <= 2 mean`` where ``mean < dry_floor``.

    A cell whose edges together hold more than twice its mean could lose more
    than it holds in one step; wet cells are covered by the CFL area ratio.
    """
    total = left + right
    excess = (mean < dry_floor) & (total > 2.0 * mean)
    safe_total = np.where(excess, total, 1.0)
    return np.where(excess, 2.0 * np.maximum(mean, 0.0) / safe_total, 1.0)


def _limit_near_dry_cells(
    fields: GhostedFields, minus: InterfaceSide, plus: InterfaceSide, dry_floor: float
) -> Tuple[InterfaceSide, InterfaceSide]:
    # interior cell k has its left edge in plus[k-1] and its right edge in minus[k]
    n = fields.a1.size - 2
    minus_scale = {"a1": np.ones(n + 1), "a2": np.ones(n + 1)}
    plus_scale = {"a1": np.ones(n + 1), "a2": np.ones(n + 1)}
    for name in ("a1", "a2"):
        scale = near_dry_scale(
            getattr(fields, name)[1:-1], getattr(plus, name)[:n], getattr(minus, name)[1:], dry_floor
        )
        plus_scale[name][:n] = scale
        minus_scale[name][1:] = scale
    if all(np.all(s == 1.0) for s in (*minus_scale.values(), *plus_scale.values())):
        return minus, plus
    logger.debug("Limiting edge areas of near-dry cells")
    return _scaled(minus, minus_scale), _scaled(plus, plus_scale)


def _scaled(side: InterfaceSide, scale: Dict[str, FloatArray]) -> InterfaceSide:
    a1 = side.a1 * scale["a1"]
    a2 = side.a2 * scale["a2"]
    return replace(side, a1=a1, a2=a2, q1=a1 * side.u1, q2=a2 * side.u2)


def _stack_sides(minus: InterfaceSide, plus: InterfaceSide) -> InterfaceSide:
    return InterfaceSide(
        **{
            name: np.concatenate([getattr(minus, name), getattr(plus, name)])
            for name in InterfaceSide.__dataclass_fields__
        }
    )


def _side_from_elevations(
    w1: FloatArray,
    w2: FloatArray,
    q1: FloatArray,
    q2: FloatArray,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
) -> InterfaceSide:
    table = geometry.interface_table
    bottom = geometry.bottom_interface
    n = bottom.size
    w1 = np.maximum(w1, bottom)
    w2 = np.maximum(w2, w1)
    area, sigma = table.area_and_width(np.concatenate([w1, w2]), np.tile(np.arange(n), 2))
    a1 = np.maximum(area[:n] - geometry.floor_area_interface, 0.0)
    a2 = np.maximum(area[n:] - area[:n], 0.0)
    return _finish_side(w1, w2, a1, a2, q1, q2, geometry, params, scheme, sigma[:n], sigma[n:])


def _side_from_areas(
    a1: FloatArray,
    a2: FloatArray,
    q1: FloatArray,
    q2: FloatArray,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
) -> InterfaceSide:
    table = geometry.interface_table
    bottom = geometry.bottom_interface
    floor = geometry.floor_area_interface
    w1 = table.invert_area(bottom, a1, base_area=floor)
    w2 = np.maximum(table.invert_area(bottom, a1 + a2, base_area=floor), w1)
    return _finish_side(w1, w2, a1, a2, q1, q2, geometry, params, scheme)


def _finish_side(
    w1: FloatArray,
    w2: FloatArray,
    a1: FloatArray,
    a2: FloatArray,
    q1: FloatArray,
    q2: FloatArray,
    geometry: ChannelGeometry,
    params: PhysicalParams,
    scheme: SchemeParams,
    sigma1: Optional[FloatArray] = None,
    sigma2: Optional[FloatArray] = None,
) -> InterfaceSide:
    table = geometry.interface_table
    u1 = np.asarray(regularize_velocity(q1, a1, scheme.delta_A))
    u2 = np.asarray(regularize_velocity(q2, a2, scheme.delta_A))
    h1 = w1 - geometry.bottom_interface
    h2 = w2 - w1
    return InterfaceSide(
        w1=w1,
        w2=w2,
        a1=a1,
        a2=a2,
        q1=a1 * u1,
        q2=a2 * u2,
        u1=u1,
        u2=u2,
        h1=h1,
        h2=h2,
        sigma1=table.width_at(w1) if sigma1 is None else sigma1,
        sigma2=table.width_at(w2) if sigma2 is None else sigma2,
        w2_hat=w1 + params.r * h2,
    )


def _bounds(side: InterfaceSide, params: PhysicalParams) -> Tuple[FloatArray, ...]:
    c2 = np.sqrt(params.g * side.a2 / side.sigma2)
    return eigenvalue_bounds(side.u1, side.u2, c2, side.a1, side.sigma1, side.sigma2, params)
