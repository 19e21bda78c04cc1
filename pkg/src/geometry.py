"""Piecewise-trapezoidal channel geometry.

The channel is sampled once at the cell interfaces: bottom elevations
``B_{j+1/2}`` and width columns ``sigma(x_{j+1/2}, z_l)`` on a uniform vertical
grid.  Cell data are arithmetic means of the two adjacent interface samples.
Between two vertical levels the width is linear in ``z``, so every integral
below (areas, first moments, wall lengths) is evaluated exactly per slab.
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Tuple, Union
import logging

import numpy as np
from scipy.optimize import brentq

from src.config.constants import (
    DEFAULT_DZ,
    INVERSION_MAX_ITER,
    INVERSION_XTOL,
    LOGGER_NAME,
)
from src.types import ArrayLike, FloatArray, GeometryError, IntArray, VerticalGridOverflowError

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.geometry")

WidthFunction = Callable[[FloatArray, FloatArray], ArrayLike]
BottomFunction = Callable[[FloatArray], ArrayLike]
Rows = Optional[Union[IntArray, int]]

# Relative slack when testing elevations against the vertical grid ends.
_GRID_SLACK = 1e-12


@dataclass(frozen=True)
class TrapezoidalTable:
    """A stack of width columns sharing one uniform vertical grid.

    Row ``k`` describes the piecewise-linear width ``sigma_k(z)``.  Cumulative
    tables hold exact integrals from ``z_levels[0]`` up to each level.
    """

    z_levels: FloatArray
    widths: FloatArray
    slopes: FloatArray
    cum_area: FloatArray
    cum_moment: FloatArray
    cum_wall: FloatArray

    @classmethod
    def from_widths(cls, z_levels: FloatArray, widths: FloatArray) -> "TrapezoidalTable":
        z = np.asarray(z_levels, dtype=np.float64)
        w = np.atleast_2d(np.asarray(widths, dtype=np.float64))
        if z.ndim != 1 or z.size < 2:
            raise GeometryError("vertical grid needs at least two levels")
        if w.shape[1] != z.size:
            raise GeometryError(
                f"width table has {w.shape[1]} levels, vertical grid has {z.size}"
            )
        dz = np.diff(z)
        slopes = np.diff(w, axis=1) / dz
        slab_area = 0.5 * (w[:, 1:] + w[:, :-1]) * dz
        z_lo = z[:-1]
        # integral of z*sigma over each slab: z_l*A + s0*dz^2/2 + m*dz^3/3
        slab_moment = (
            z_lo * slab_area + w[:, :-1] * dz**2 / 2.0 + slopes * dz**3 / 3.0
        )
        slab_wall = np.sqrt(4.0 + slopes**2) * dz
        zeros = np.zeros((w.shape[0], 1))
        return cls(
            z_levels=z,
            widths=w,
            slopes=slopes,
            cum_area=np.hstack([zeros, np.cumsum(slab_area, axis=1)]),
            cum_moment=np.hstack([zeros, np.cumsum(slab_moment, axis=1)]),
            cum_wall=np.hstack([zeros, np.cumsum(slab_wall, axis=1)]),
        )

    @property
    def n_rows(self) -> int:
        return int(self.widths.shape[0])

    @property
    def z_bottom(self) -> float:
        return float(self.z_levels[0])

    @property
    def z_top(self) -> float:
        return float(self.z_levels[-1])

    @property
    def dz(self) -> float:
        return float(self.z_levels[1] - self.z_levels[0])

    def select(self, rows: IntArray) -> "TrapezoidalTable":
        """Sub-table made of the given rows."""
        idx = np.asarray(rows, dtype=np.intp)
        return TrapezoidalTable(
            z_levels=self.z_levels,
            widths=self.widths[idx],
            slopes=self.slopes[idx],
            cum_area=self.cum_area[idx],
            cum_moment=self.cum_moment[idx],
            cum_wall=self.cum_wall[idx],
        )

    def _rows(self, rows: Rows, z: FloatArray) -> IntArray:
        if rows is None:
            if self.n_rows == 1:
                return np.zeros(z.shape, dtype=np.intp)
            if z.shape != (self.n_rows,):
                raise GeometryError(
                    f"expected {self.n_rows} elevations, got shape {z.shape}"
                )
            return np.arange(self.n_rows, dtype=np.intp)
        return np.broadcast_to(np.asarray(rows, dtype=np.intp), z.shape)

    def _locate(self, rows: Rows, z: ArrayLike) -> Tuple[IntArray, IntArray, FloatArray]:
        """Return (rows, slab index, offset above the slab floor) for elevations."""
        zz = np.atleast_1d(np.asarray(z, dtype=np.float64))
        r = self._rows(rows, zz)
        span = self.z_top - self.z_bottom
        slack = _GRID_SLACK * max(1.0, span, abs(self.z_top))
        outside = (zz < self.z_bottom - slack) | (zz > self.z_top + slack) | ~np.isfinite(zz)
        if np.any(outside):
            bad = float(zz[np.argmax(outside)])
            raise GeometryError(
                f"elevation {bad} outside vertical grid "
                f"[{self.z_bottom}, {self.z_top}]",
                z=bad,
            )
        zc = np.clip(zz, self.z_bottom, self.z_top)
        n_slabs = self.z_levels.size - 1
        slab = np.clip(
            np.floor((zc - self.z_bottom) / self.dz).astype(np.intp), 0, n_slabs - 1
        )
        offset = zc - self.z_levels[slab]
        return r, slab, offset

    def width_at(self, z: ArrayLike, rows: Rows = None) -> FloatArray:
        """Linearly interpolated width at elevation ``z``."""
        r, slab, d = self._locate(rows, z)
        return self.widths[r, slab] + self.slopes[r, slab] * d

    def area_below(self, z: ArrayLike, rows: Rows = None) -> FloatArray:
        """Exact area from the grid floor up to ``z``."""
        r, slab, d = self._locate(rows, z)
        s0 = self.widths[r, slab]
        m = self.slopes[r, slab]
        return self.cum_area[r, slab] + s0 * d + 0.5 * m * d**2

    def area_and_width(self, z: ArrayLike, rows: Rows = None) -> Tuple[FloatArray, FloatArray]:
        """``(area_below(z), width_at(z))`` from a single slab lookup."""
        r, slab, d = self._locate(rows, z)
        s0 = self.widths[r, slab]
        m = self.slopes[r, slab]
        return self.cum_area[r, slab] + s0 * d + 0.5 * m * d**2, s0 + m * d

    def moment_below(self, z: ArrayLike, rows: Rows = None) -> FloatArray:
        """Exact integral of ``z * sigma(z)`` from the grid floor up to ``z``."""
        r, slab, d = self._locate(rows, z)
        s0 = self.widths[r, slab]
        m = self.slopes[r, slab]
        zl = self.z_levels[slab]
        partial_area = s0 * d + 0.5 * m * d**2
        return (
            self.cum_moment[r, slab] + zl * partial_area + s0 * d**2 / 2.0 + m * d**3 / 3.0
        )

    def wall_below(self, z: ArrayLike, rows: Rows = None) -> FloatArray:
        """Integral of ``sqrt(4 + sigma_z^2)`` from the grid floor up to ``z``."""
        r, slab, d = self._locate(rows, z)
        return self.cum_wall[r, slab] + np.sqrt(4.0 + self.slopes[r, slab] ** 2) * d

    def area_between(self, base: ArrayLike, top: ArrayLike, rows: Rows = None) -> FloatArray:
        b = np.atleast_1d(np.asarray(base, dtype=np.float64))
        t = np.atleast_1d(np.asarray(top, dtype=np.float64))
        b, t = np.broadcast_arrays(b, t)
        _check_order(b, t)
        return np.maximum(self.area_below(t, rows) - self.area_below(b, rows), 0.0)

    def moment_between(self, base: ArrayLike, top: ArrayLike, rows: Rows = None) -> FloatArray:
        b, t = np.broadcast_arrays(
            np.atleast_1d(np.asarray(base, dtype=np.float64)),
            np.atleast_1d(np.asarray(top, dtype=np.float64)),
        )
        return self.moment_below(t, rows) - self.moment_below(b, rows)

    def invert_area(
        self,
        base: ArrayLike,
        target: ArrayLike,
        rows: Rows = None,
        base_area: Optional[FloatArray] = None,
    ) -> FloatArray:
        """Elevation ``w`` with ``area_between(base, w) == target`` per row.

        ``base_area`` is ``area_below(base)`` when the caller already has it.
        """
        b, a = np.broadcast_arrays(
            np.atleast_1d(np.asarray(base, dtype=np.float64)),
            np.atleast_1d(np.asarray(target, dtype=np.float64)),
        )
        if np.any(a < 0.0):
            bad = int(np.argmax(a < 0.0))
            raise GeometryError(f"negative target area {a[bad]}", z=float(b[bad]))
        r = self._rows(rows, b)
        floor = self.area_below(b, r) if base_area is None else base_area
        absolute = floor + a
        total = self.cum_area[r, -1]
        overflow = absolute > total + 1e-12 * np.maximum(1.0, total)
        if np.any(overflow):
            k = int(np.argmax(overflow))
            raise VerticalGridOverflowError(
                f"area {a[k]} above elevation {b[k]} exceeds the vertical grid "
                f"(top {self.z_top}); raise z_top",
                z=self.z_top,
            )
        absolute = np.minimum(absolute, total)
        cum = self.cum_area[r]
        n_slabs = self.z_levels.size - 1
        slab = np.clip(np.sum(cum <= absolute[:, None], axis=1) - 1, 0, n_slabs - 1)
        rem = absolute - cum[np.arange(slab.size), slab]
        s0 = self.widths[r, slab]
        m = self.slopes[r, slab]
        disc = s0**2 + 2.0 * m * rem
        with np.errstate(invalid="ignore", divide="ignore"):
            # stable root of s0*d + m*d^2/2 = rem
            d = 2.0 * rem / (s0 + np.sqrt(disc))
        dz = self.dz
        tol = 1e-9 * dz
        bad = ~np.isfinite(d) | (disc < 0.0) | (d < -tol) | (d > dz + tol)
        for k in np.flatnonzero(bad):
            d[k] = _bisect_slab(float(s0[k]), float(m[k]), float(rem[k]), dz)
        w = self.z_levels[slab] + np.clip(d, 0.0, dz)
        w = np.where(a == 0.0, b, np.maximum(w, b))
        return w


def _bisect_slab(s0: float, m: float, rem: float, dz: float) -> float:
    """Bracketed fallback for the per-slab quadratic."""
    if rem <= 0.0:
        return 0.0

    def residual(d: float) -> float:
        return s0 * d + 0.5 * m * d * d - rem

    if residual(dz) <= 0.0:
        return dz
    return float(brentq(residual, 0.0, dz, xtol=INVERSION_XTOL, maxiter=INVERSION_MAX_ITER))


def _check_order(base: FloatArray, top: FloatArray) -> None:
    scale = np.maximum(1.0, np.abs(top))
    bad = base > top + 1e-13 * scale
    if np.any(bad):
        k = int(np.argmax(bad))
        raise GeometryError(
            f"base elevation {base[k]} above top elevation {top[k]}", z=float(base[k])
        )


@dataclass(frozen=True)
class ChannelGeometry:
    """Discretized channel: interface samples plus derived cell data."""

    n_cells: int
    dx: float
    dz: float
    x_interfaces: FloatArray
    bottom_interface: FloatArray
    bottom_cell: FloatArray
    z_levels: FloatArray
    width_interface: FloatArray
    width_cell: FloatArray
    interface_table: TrapezoidalTable
    cell_table: TrapezoidalTable
    ghost_table: TrapezoidalTable
    width_x_table: TrapezoidalTable

    @property
    def x_cells(self) -> FloatArray:
        return 0.5 * (self.x_interfaces[1:] + self.x_interfaces[:-1])

    @property
    def z_top(self) -> float:
        return float(self.z_levels[-1])

    @property
    def ghost_bottom(self) -> FloatArray:
        """Cell bottoms with one mirrored ghost cell per side (N+2)."""
        return np.concatenate(
            [self.bottom_interface[:1], self.bottom_cell, self.bottom_interface[-1:]]
        )

    @property
    def ghost_interface_bottom(self) -> FloatArray:
        """Interface bottoms of the ghosted grid (N+3)."""
        return np.concatenate(
            [self.bottom_interface[:1], self.bottom_interface, self.bottom_interface[-1:]]
        )

    @cached_property
    def bottom_width_cell(self) -> FloatArray:
        """Width at the cell bottom, sigma_B."""
        return self.cell_table.width_at(self.bottom_cell)

    @cached_property
    def floor_area_cell(self) -> FloatArray:
        """``cell_table.area_below(bottom_cell)``, reused by every deconvolution."""
        return self.cell_table.area_below(self.bottom_cell)

    @cached_property
    def floor_area_interface(self) -> FloatArray:
        return self.interface_table.area_below(self.bottom_interface)

    def column(self, j: int, at: str = "cell") -> TrapezoidalTable:
        """Single trapezoidal column of cell ``j`` or interface ``j``."""
        table = self.cell_table if at == "cell" else self.interface_table
        return table.select(np.array([j]))


def build_channel(
    width_fn: WidthFunction,
    bottom_fn: BottomFunction,
    domain: Tuple[float, float],
    n_cells: int,
    dz: float = DEFAULT_DZ,
    z_top: float = 2.0,
) -> ChannelGeometry:
    """Sample width and bottom at the interfaces and build the trapezoidal tables."""
    if n_cells < 4:
        raise GeometryError(f"n_cells must be at least 4, got {n_cells}")
    if dz <= 0.0:
        raise GeometryError(f"dz must be positive, got {dz}")
    x_lo, x_hi = float(domain[0]), float(domain[1])
    if not x_hi > x_lo:
        raise GeometryError(f"empty domain [{x_lo}, {x_hi}]")

    x_if = np.linspace(x_lo, x_hi, n_cells + 1)
    bottom = np.broadcast_to(
        np.asarray(bottom_fn(x_if), dtype=np.float64), x_if.shape
    ).copy()
    if z_top <= float(bottom.max()):
        raise GeometryError(
            f"z_top {z_top} must exceed the highest bottom {bottom.max()}", z=z_top
        )
    z_levels = _vertical_grid(float(bottom.min()), z_top, dz)
    widths = np.broadcast_to(
        np.asarray(width_fn(x_if[:, None], z_levels[None, :]), dtype=np.float64),
        (x_if.size, z_levels.size),
    ).copy()
    _check_widths(widths, x_if, z_levels)
    return _assemble(x_if, bottom, z_levels, widths)


def load_tabulated_channel(path: Union[str, Path], x_start: float = 0.0) -> ChannelGeometry:
    """Read a channel from the plain-text ``nx nz dx dz`` table format."""
    path = Path(path)
    if not path.exists():
        raise GeometryError(f"geometry file not found: {path}")
    tokens = path.read_text().split()
    try:
        nx, nz = int(tokens[0]), int(tokens[1])
        dx, dz = float(tokens[2]), float(tokens[3])
        values = np.array([float(t) for t in tokens[4:]], dtype=np.float64)
    except (IndexError, ValueError) as e:
        raise GeometryError(f"malformed geometry header in {path}") from e
    expected = (nx + 1) + (nx + 1) * nz
    if values.size != expected:
        raise GeometryError(
            f"{path}: expected {expected} values after the header, found {values.size}"
        )
    if nx < 4 or nz < 2 or dx <= 0.0 or dz <= 0.0:
        raise GeometryError(f"{path}: invalid header nx={nx} nz={nz} dx={dx} dz={dz}")
    bottom = values[: nx + 1]
    widths = values[nx + 1:].reshape(nx + 1, nz)
    x_if = x_start + dx * np.arange(nx + 1)
    z_levels = float(bottom.min()) + dz * np.arange(nz)
    _check_widths(widths, x_if, z_levels)
    logger.info(f"Loaded tabulated channel {path} ({nx} cells, {nz} levels)")
    return _assemble(x_if, bottom, z_levels, widths)


def _vertical_grid(z_floor: float, z_top: float, dz: float) -> FloatArray:
    n_levels = int(np.ceil((z_top - z_floor) / dz - 1e-9)) + 1
    return z_floor + dz * np.arange(max(n_levels, 2), dtype=np.float64)


def _check_widths(widths: FloatArray, x_if: FloatArray, z_levels: FloatArray) -> None:
    bad = ~(widths > 0.0) | ~np.isfinite(widths)
    if np.any(bad):
        i, l = np.unravel_index(int(np.argmax(bad)), widths.shape)
        x_bad, z_bad = float(x_if[i]), float(z_levels[l])
        raise GeometryError(
            f"non-positive channel width {widths[i, l]} at x={x_bad}, z={z_bad}",
            x=x_bad,
            z=z_bad,
        )


def _assemble(
    x_if: FloatArray, bottom: FloatArray, z_levels: FloatArray, widths: FloatArray
) -> ChannelGeometry:
    n_cells = x_if.size - 1
    dx = float(x_if[1] - x_if[0])
    width_cell = 0.5 * (widths[1:] + widths[:-1])
    ghost_widths = np.vstack([widths[:1], width_cell, widths[-1:]])
    width_x = (widths[1:] - widths[:-1]) / dx
    return ChannelGeometry(
        n_cells=n_cells,
        dx=dx,
        dz=float(z_levels[1] - z_levels[0]),
        x_interfaces=x_if,
        bottom_interface=bottom,
        bottom_cell=0.5 * (bottom[1:] + bottom[:-1]),
        z_levels=z_levels,
        width_interface=widths,
        width_cell=width_cell,
        interface_table=TrapezoidalTable.from_widths(z_levels, widths),
        cell_table=TrapezoidalTable.from_widths(z_levels, width_cell),
        ghost_table=TrapezoidalTable.from_widths(z_levels, ghost_widths),
        width_x_table=TrapezoidalTable.from_widths(z_levels, width_x),
    )


def _scalar_or_array(value: FloatArray, like: ArrayLike) -> ArrayLike:
    if np.ndim(like) == 0 and value.size == 1:
        return float(value[0])
    return value


def wetted_area(
    column: TrapezoidalTable, base: ArrayLike, top: ArrayLike, rows: Rows = None
) -> ArrayLike:
    """Exact area of the trapezoidal column between ``base`` and ``top``."""
    return _scalar_or_array(column.area_between(base, top, rows), top)


def area_to_elevation(
    column: TrapezoidalTable, base: ArrayLike, target_area: ArrayLike, rows: Rows = None
) -> ArrayLike:
    """Inverse of :func:`wetted_area` in its upper limit."""
    return _scalar_or_array(column.invert_area(base, target_area, rows), target_area)


def wetted_perimeter(
    column: TrapezoidalTable,
    sigma_B: ArrayLike,
    base: ArrayLike,
    top: ArrayLike,
    rows: Rows = None,
) -> ArrayLike:
    """Bottom width plus the length of both side walls between base and top."""
    b, t = np.broadcast_arrays(
        np.atleast_1d(np.asarray(base, dtype=np.float64)),
        np.atleast_1d(np.asarray(top, dtype=np.float64)),
    )
    _check_order(b, t)
    walls = np.maximum(column.wall_below(t, rows) - column.wall_below(b, rows), 0.0)
    return _scalar_or_array(np.asarray(sigma_B, dtype=np.float64) + walls, top)


def hydraulic_radius(total_area: ArrayLike, perimeter: ArrayLike) -> ArrayLike:
    """R = A / P."""
    p = np.asarray(perimeter, dtype=np.float64)
    if np.any(p <= 0.0):
        raise GeometryError("wetted perimeter must be positive")
    radius = np.asarray(total_area, dtype=np.float64) / p
    return float(radius) if radius.ndim == 0 else radius


def width_x_integrals(
    geometry: ChannelGeometry,
    j: Union[int, IntArray],
    w1: ArrayLike,
    w2: ArrayLike,
) -> Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike]:
    """Width-variation integrals I1..I4 at cell ``j``.

    ``sigma_x`` is the centered divided difference of the two interface
    columns of the cell, integrated exactly over the trapezoidal slabs.
    """
    rows = np.atleast_1d(np.asarray(j, dtype=np.intp))
    e1, e2 = np.broadcast_arrays(
        np.atleast_1d(np.asarray(w1, dtype=np.float64)),
        np.atleast_1d(np.asarray(w2, dtype=np.float64)),
    )
    rows = np.broadcast_to(rows, e1.shape)
    base = geometry.bottom_cell[rows]
    _check_order(base, e1)
    _check_order(e1, e2)
    table = geometry.width_x_table
    area_b = table.area_below(base, rows)
    area_1 = table.area_below(e1, rows)
    area_2 = table.area_below(e2, rows)
    mom_b = table.moment_below(base, rows)
    mom_1 = table.moment_below(e1, rows)
    mom_2 = table.moment_below(e2, rows)
    i3 = area_1 - area_b
    i4 = area_2 - area_b
    i1 = e1 * i3 - (mom_1 - mom_b)
    i2 = e2 * (area_2 - area_1) - (mom_2 - mom_1)
    if np.ndim(j) == 0 and np.ndim(w1) == 0 and np.ndim(w2) == 0:
        return float(i1[0]), float(i2[0]), float(i3[0]), float(i4[0])
    return i1, i2, i3, i4
