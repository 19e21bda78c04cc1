"""Fluxes of the alternative form and the well-balanced source discretization."""

from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np

from src.config.constants import (
    ENTRAINMENT_FROUDE_SHIFT,
    ENTRAINMENT_MIN_AREA,
    LOGGER_NAME,
    SPEED_GAP_TOL,
)
from src.config.settings import PhysicalParams
from src.eigen import LocalSpeeds
from src.geometry import ChannelGeometry
from src.reconstruction import InterfaceData, InterfaceSide
from src.types import ArrayLike, FloatArray

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.flux")


@dataclass(frozen=True, eq=False)
class SourceTerms:
    """Per-cell source contributions to dA1/dt, dQ1/dt, dA2/dt, dQ2/dt."""

    s_a1: FloatArray
    s_q1: FloatArray
    s_a2: FloatArray
    s_q2: FloatArray

    def as_array(self) -> FloatArray:
        return np.vstack([self.s_a1, self.s_q1, self.s_a2, self.s_q2])

    def __add__(self, other: "SourceTerms") -> "SourceTerms":
        return SourceTerms(
            s_a1=self.s_a1 + other.s_a1,
            s_q1=self.s_q1 + other.s_q1,
            s_a2=self.s_a2 + other.s_a2,
            s_q2=self.s_q2 + other.s_q2,
        )

    @classmethod
    def zeros(cls, n: int) -> "SourceTerms":
        return cls(*(np.zeros(n) for _ in range(4)))


def physical_flux(
    a1: ArrayLike,
    q1: ArrayLike,
    a2: ArrayLike,
    q2: ArrayLike,
    w2_hat: ArrayLike,
    w2: ArrayLike,
    params: PhysicalParams,
    u1: ArrayLike,
    u2: ArrayLike,
) -> FloatArray:
    """F = (Q1, Q1 u1 + g w2_hat A1, Q2, Q2 u2 + g w2 A2) with regularized velocities."""
    g = params.g
    return np.array(
        [
            q1,
            np.asarray(q1) * u1 + g * np.asarray(w2_hat) * a1,
            q2,
            np.asarray(q2) * u2 + g * np.asarray(w2) * a2,
        ],
        dtype=np.float64,
    )


def side_flux(side: InterfaceSide, params: PhysicalParams) -> FloatArray:
    return physical_flux(
        side.a1, side.q1, side.a2, side.q2, side.w2_hat, side.w2, params, side.u1, side.u2
    )


def numerical_flux(
    w_minus: FloatArray,
    w_plus: FloatArray,
    f_minus: FloatArray,
    f_plus: FloatArray,
    a_minus: ArrayLike,
    a_plus: ArrayLike,
) -> FloatArray:
    """Central-upwind flux; arithmetic mean where a+ - a- vanishes."""
    gap = np.asarray(a_plus, dtype=np.float64) - a_minus
    degenerate = gap < SPEED_GAP_TOL
    safe_gap = np.where(degenerate, 1.0, gap)
    upwind = (a_plus * f_minus - a_minus * f_plus) / safe_gap + (
        a_plus * a_minus / safe_gap
    ) * (w_plus - w_minus)
    return np.where(degenerate, 0.5 * (f_minus + f_plus), upwind)


def interface_average(
    value_minus: FloatArray, value_plus: FloatArray, speeds: LocalSpeeds
) -> FloatArray:
    """(a+ v^- - a- v^+)/(a+ - a-), consistent with :func:`numerical_flux`."""
    gap = speeds.a_plus - speeds.a_minus
    degenerate = gap < SPEED_GAP_TOL
    safe_gap = np.where(degenerate, 1.0, gap)
    weighted = (speeds.a_plus * value_minus - speeds.a_minus * value_plus) / safe_gap
    return np.where(degenerate, 0.5 * (value_minus + value_plus), weighted)


def interface_fluxes(interfaces: InterfaceData, params: PhysicalParams) -> FloatArray:
    """The (4, N+1) array of numerical fluxes H_{j+1/2}."""
    speeds = interfaces.speeds
    return numerical_flux(
        interfaces.left.conserved(),
        interfaces.right.conserved(),
        side_flux(interfaces.left, params),
        side_flux(interfaces.right, params),
        speeds.a_minus,
        speeds.a_plus,
    )


def pressure_exchange_source(
    interfaces: InterfaceData,
    w2_hat: FloatArray,
    w2: FloatArray,
    dx: float,
    params: PhysicalParams,
) -> Tuple[FloatArray, FloatArray]:
    """g w2_hat dA1/dx and g w2 dA2/dx with interface areas averaged like the flux."""
    speeds = interfaces.speeds
    a1_face = interface_average(interfaces.left.a1, interfaces.right.a1, speeds)
    a2_face = interface_average(interfaces.left.a2, interfaces.right.a2, speeds)
    s_q1 = params.g * w2_hat * (a1_face[1:] - a1_face[:-1]) / dx
    s_q2 = params.g * w2 * (a2_face[1:] - a2_face[:-1]) / dx
    return s_q1, s_q2


def cell_hydraulic_radius(
    geometry: ChannelGeometry, a1: FloatArray, a2: FloatArray, w2: FloatArray
) -> FloatArray:
    """R = (A1 + A2) / (sigma_B + wall length from the bottom to w2) per cell."""
    table = geometry.cell_table
    bottom = geometry.bottom_cell
    walls = table.wall_below(w2) - table.wall_below(bottom)
    return (a1 + a2) / (geometry.bottom_width_cell + np.maximum(walls, 0.0))


def friction_source(
    a1: FloatArray,
    q1: FloatArray,
    a2: FloatArray,
    q2: FloatArray,
    u1: FloatArray,
    u2: FloatArray,
    radius: FloatArray,
    params: PhysicalParams,
    delta_A: float,
) -> Tuple[FloatArray, FloatArray]:
    """Manning interlayer and bottom friction."""
    total = np.asarray(a1, dtype=np.float64) + a2
    if not params.friction_enabled:
        return np.zeros_like(total), np.zeros_like(total)
    wet = total >= delta_A**0.25
    safe_total = np.where(wet, total, 1.0)
    safe_radius = np.where(wet & (radius > 0.0), radius, 1.0)
    phi = np.abs((q1 * a1 + q2 * a2) / safe_total)
    scale = params.g * phi / safe_radius ** (4.0 / 3.0)
    interlayer = params.n_i**2 * scale
    s_q1 = -params.r * interlayer * (u1 - u2) - params.n_b**2 * scale * u1
    s_q2 = -interlayer * (u2 - u1)
    return np.where(wet, s_q1, 0.0), np.where(wet, s_q2, 0.0)


def entrainment_velocity(g2: ArrayLike, u1: ArrayLike, params: PhysicalParams) -> ArrayLike:
    """V_e = k G^2 / (G^2 + 5) u1."""
    g2_arr = np.asarray(g2, dtype=np.float64)
    return params.entrain_k * g2_arr / (g2_arr + ENTRAINMENT_FROUDE_SHIFT) * np.asarray(u1)


def entrainment_source(
    a1: FloatArray,
    a2: FloatArray,
    u1: FloatArray,
    u2: FloatArray,
    sigma1: FloatArray,
    g2: FloatArray,
    params: PhysicalParams,
) -> SourceTerms:
    """Mass and momentum exchange (S_e, S_e u1, -r S_e, -r S_e u2)."""
    a1 = np.atleast_1d(np.asarray(a1, dtype=np.float64))
    if not params.entrainment_enabled:
        return SourceTerms.zeros(a1.size)
    active = np.atleast_1d(np.asarray(a2) > ENTRAINMENT_MIN_AREA)
    rate = np.where(active, a1 / sigma1 * entrainment_velocity(g2, u1, params), 0.0)
    return SourceTerms(
        s_a1=rate,
        s_q1=rate * u1,
        s_a2=-params.r * rate,
        s_q2=-params.r * rate * u2,
    )
