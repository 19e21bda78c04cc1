"""Tests for numerical fluxes, pressure exchange, friction and entrainment."""

import numpy as np
import pytest

from src.config.settings import PhysicalParams
from src.flux_sources import (
    SourceTerms,
    cell_hydraulic_radius,
    entrainment_source,
    entrainment_velocity,
    friction_source,
    interface_fluxes,
    numerical_flux,
    physical_flux,
    pressure_exchange_source,
)
from src.reconstruction import reconstruct_interfaces
from src.scenarios import state_from_elevations
from src.state import derive_cells
from src.stepper import BoundarySpec, apply_boundaries


def test_physical_flux_components() -> None:
    params = PhysicalParams(g=10.0, r=0.5)
    flux = physical_flux(2.0, 1.0, 1.0, -0.5, 0.8, 1.2, params, 0.5, -0.5)
    assert flux.shape == (4,)
    assert np.allclose(flux, [1.0, 0.5 + 10.0 * 0.8 * 2.0, -0.5, 0.25 + 10.0 * 1.2])


def test_numerical_flux_consistency() -> None:
    w = np.array([[1.0], [2.0]])
    f = np.array([[3.0], [4.0]])
    flux = numerical_flux(w, w, f, f, np.array([-1.0]), np.array([2.0]))
    assert np.allclose(flux, f)


def test_numerical_flux_upwinding() -> None:
    w_minus, w_plus = np.array([[1.0]]), np.array([[2.0]])
    f_minus, f_plus = np.array([[5.0]]), np.array([[7.0]])
    assert numerical_flux(w_minus, w_plus, f_minus, f_plus, np.array([0.0]), np.array([1.0]))[0, 0] == 5.0
    assert numerical_flux(w_minus, w_plus, f_minus, f_plus, np.array([-1.0]), np.array([0.0]))[0, 0] == 7.0
    degenerate = numerical_flux(w_minus, w_plus, f_minus, f_plus, np.array([0.0]), np.array([0.0]))
    assert degenerate[0, 0] == 6.0


def test_well_balanced_cancellation(rest_channel, physics, scheme) -> None:
    x = rest_channel.x_cells
    state = state_from_elevations(rest_channel, np.full_like(x, 0.7), np.full_like(x, 1.2), 0.0, 0.0)
    derived = derive_cells(state, rest_channel, physics, scheme.delta_A)
    fields = apply_boundaries(state, derived, rest_channel, BoundarySpec(), physics)
    interfaces = reconstruct_interfaces(fields, rest_channel, physics, scheme)
    fluxes = interface_fluxes(interfaces, physics)
    s_q1, s_q2 = pressure_exchange_source(
        interfaces, derived.w2_hat, derived.w2, rest_channel.dx, physics
    )
    balance_q1 = -(fluxes[1, 1:] - fluxes[1, :-1]) / rest_channel.dx + s_q1
    balance_q2 = -(fluxes[3, 1:] - fluxes[3, :-1]) / rest_channel.dx + s_q2
    assert np.max(np.abs(balance_q1)) < 1e-9
    assert np.max(np.abs(balance_q2)) < 1e-9
    assert np.max(np.abs(s_q1)) > 1e-3


def test_friction_opposes_motion(unit_channel) -> None:
    params = PhysicalParams(n_i=0.01, n_b=0.02, friction_enabled=True)
    n = unit_channel.n_cells
    x = unit_channel.x_cells
    state = state_from_elevations(unit_channel, np.full_like(x, 0.5), np.full_like(x, 1.0), 1.0, 1.0)
    derived = derive_cells(state, unit_channel, params, 1e-12)
    radius = cell_hydraulic_radius(unit_channel, state.a1, state.a2, derived.w2)
    assert np.allclose(radius, 1.0 / 3.0)
    s_q1, s_q2 = friction_source(
        state.a1, state.q1, state.a2, state.q2, derived.u1, derived.u2, radius, params, 1e-12
    )
    assert np.all(s_q1 < 0.0)
    assert np.allclose(s_q2, 0.0)
    disabled = friction_source(
        state.a1, state.q1, state.a2, state.q2, derived.u1, derived.u2, radius,
        PhysicalParams(n_i=0.01, n_b=0.02), 1e-12,
    )
    assert np.all(disabled[0] == 0.0) and disabled[0].size == n


def test_friction_dry_cells_skipped() -> None:
    params = PhysicalParams(n_i=0.01, n_b=0.01, friction_enabled=True)
    zero = np.zeros(2)
    s_q1, s_q2 = friction_source(zero, zero, zero, zero, zero, zero, zero, params, 1e-12)
    assert np.all(s_q1 == 0.0) and np.all(s_q2 == 0.0)


def test_entrainment_velocity_formula() -> None:
    params = PhysicalParams(entrain_k=0.1)
    assert entrainment_velocity(5.0, 2.0, params) == pytest.approx(0.1 * 0.5 * 2.0)
    assert entrainment_velocity(0.0, 2.0, params) == 0.0


def test_entrainment_source_exchange() -> None:
    params = PhysicalParams(r=0.95, entrain_k=0.1, entrainment_enabled=True)
    a1 = np.array([0.5, 0.5])
    a2 = np.array([1.0, 1e-9])
    u1 = np.array([1.0, 1.0])
    u2 = np.array([0.2, 0.2])
    sigma1 = np.ones(2)
    g2 = np.array([5.0, 5.0])
    source = entrainment_source(a1, a2, u1, u2, sigma1, g2, params)
    assert source.s_a1[0] == pytest.approx(0.5 * 0.05)
    assert source.s_a2[0] == pytest.approx(-0.95 * source.s_a1[0])
    assert source.s_q1[0] == pytest.approx(source.s_a1[0] * 1.0)
    assert source.s_q2[0] == pytest.approx(-0.95 * source.s_a1[0] * 0.2)
    assert source.s_a1[1] == 0.0
    off = entrainment_source(a1, a2, u1, u2, sigma1, g2, PhysicalParams(entrain_k=0.1))
    assert np.all(off.as_array() == 0.0)


def test_source_terms_add() -> None:
    total = SourceTerms.zeros(3) + SourceTerms(np.ones(3), np.ones(3), np.zeros(3), np.ones(3))
    assert total.as_array().shape == (4, 3)
    assert np.all(total.s_q2 == 1.0)
