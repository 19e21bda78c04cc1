"""Tests for conserved state containers and cell deconvolution."""

import numpy as np
import pytest

from src.config.settings import PhysicalParams
from src.scenarios import state_from_elevations
from src.state import FlowState, derive_cell, derive_cells, pressure_terms
from src.types import GeometryError


def test_flow_state_is_read_only() -> None:
    state = FlowState(a1=[1.0, 2.0], q1=[0.0, 0.0], a2=[1.0, 1.0], q2=[0.5, 0.5])
    assert state.n_cells == 2
    with pytest.raises(ValueError):
        state.a1[0] = 3.0
    values = state.as_array()
    assert values.shape == (4, 2)
    again = FlowState.from_array(values, time=0.5)
    assert again.time == 0.5
    assert np.array_equal(again.q2, state.q2)
    assert state.with_time(1.0).time == 1.0


def test_flow_state_rejects_mismatched_shapes() -> None:
    with pytest.raises(ValueError):
        FlowState(a1=[1.0, 2.0], q1=[0.0], a2=[1.0, 1.0], q2=[0.0, 0.0])


def test_derive_cells_rectangular(unit_channel, physics) -> None:
    x = unit_channel.x_cells
    state = state_from_elevations(unit_channel, np.full_like(x, 0.4), np.full_like(x, 1.0), 0.5, -0.25)
    derived = derive_cells(state, unit_channel, physics, 1e-12)
    assert np.allclose(derived.w1, 0.4, atol=1e-14)
    assert np.allclose(derived.h2, 0.6, atol=1e-14)
    assert np.allclose(derived.u1, 0.5)
    assert np.allclose(derived.u2, -0.25)
    assert np.allclose(derived.w2_hat, 0.4 + physics.r * 0.6)
    assert np.allclose(derived.sigma1, 1.0)
    assert np.allclose(derived.c2, np.sqrt(physics.g * 0.6))


def test_derive_cell_matches_vector(rest_channel, physics) -> None:
    x = rest_channel.x_cells
    state = state_from_elevations(rest_channel, np.full_like(x, 0.7), np.full_like(x, 1.2), 0.1, 0.0)
    all_cells = derive_cells(state, rest_channel, physics, 1e-12)
    one = derive_cell(state, rest_channel, physics, 17, 1e-12)
    assert one.w1[0] == pytest.approx(all_cells.w1[17])
    assert one.sigma2[0] == pytest.approx(all_cells.sigma2[17])
    assert all_cells.cell(17).u1[0] == all_cells.u1[17]
    with pytest.raises(IndexError):
        derive_cell(state, rest_channel, physics, rest_channel.n_cells, 1e-12)


def test_derive_cells_errors(unit_channel, physics) -> None:
    n = unit_channel.n_cells
    short = FlowState(np.ones(3), np.zeros(3), np.ones(3), np.zeros(3))
    with pytest.raises(ValueError):
        derive_cells(short, unit_channel, physics, 1e-12)
    negative = FlowState(np.full(n, -0.1), np.zeros(n), np.ones(n), np.zeros(n))
    with pytest.raises(GeometryError):
        derive_cells(negative, unit_channel, physics, 1e-12)


def test_dry_cell_has_zero_velocity(unit_channel, physics) -> None:
    n = unit_channel.n_cells
    state = FlowState(np.zeros(n), np.zeros(n), np.ones(n), np.zeros(n))
    derived = derive_cells(state, unit_channel, physics, 1e-12)
    assert np.all(derived.u1 == 0.0)
    assert np.allclose(derived.w1, 0.0)
    assert np.allclose(derived.c1, 0.0)


def test_pressure_terms_rectangular(unit_channel) -> None:
    params = PhysicalParams(r=0.5)
    x = unit_channel.x_cells
    state = state_from_elevations(unit_channel, np.full_like(x, 0.4), np.full_like(x, 1.0), 0.0, 0.0)
    derived = derive_cells(state, unit_channel, params, 1e-12)
    p1, p2 = pressure_terms(derived, unit_channel, params)
    g = params.g
    # rectangular section: p2 = g h2^2/2, p1 = g (h1^2/2 + r h2 h1)
    assert np.allclose(p2, g * 0.6**2 / 2.0)
    assert np.allclose(p1, g * (0.4**2 / 2.0 + 0.5 * 0.6 * 0.4))
    single = pressure_terms(derived.cell(3), unit_channel, params, j=3)
    assert single[0] == pytest.approx(float(p1[3]))
