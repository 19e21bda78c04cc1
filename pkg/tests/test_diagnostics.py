"""Tests for run-time diagnostics."""

import logging

import numpy as np
import pytest

from src.config.settings import PhysicalParams
from src.diagnostics import (
    DiagnosticsRecord,
    Snapshot,
    check_entropy,
    convergence_norms,
    entropy,
    entropy_production,
    hyperbolic_loss_cells,
    internal_wave_residual,
    jump_filtered_variation,
    locate_jumps,
    locate_waves,
    make_record,
    quasilinear_source,
    restrict,
    steady_invariants,
)
from src.config.constants import DIAGNOSTIC_COLUMNS
from src.scenarios import state_from_elevations
from src.state import derive_cells, pressure_terms


def _state(geometry, params, w1=0.4, w2=1.0, u1=0.0, u2=0.0):
    x = geometry.x_cells
    state = state_from_elevations(geometry, np.full_like(x, w1), np.full_like(x, w2), u1, u2)
    return state, derive_cells(state, geometry, params, 1e-12)


def _record(time, total, flux_left=0.0, flux_right=0.0):
    zeros = np.zeros(1)
    return DiagnosticsRecord(
        time=time, mass1=1.0, mass2=1.0, max_u1=0.0, max_u2=0.0, max_du=0.0,
        q1=zeros, q2=zeros, e1=zeros, e2=zeros, entropy_total=total,
        entropy_flux_left=flux_left, entropy_flux_right=flux_right,
    )


def test_rest_invariants_are_constant(rest_channel, physics) -> None:
    state, derived = _state(rest_channel, physics, 0.7, 1.2)
    q1, q2, e1, e2 = steady_invariants(state, derived, physics)
    assert np.all(q1 == 0.0) and np.all(q2 == 0.0)
    assert np.allclose(e1, physics.g * (0.7 + physics.r * 0.5), atol=1e-12)
    assert np.allclose(e2, physics.g * 1.2, atol=1e-12)


def test_energy_with_flow(unit_channel, physics) -> None:
    state, derived = _state(unit_channel, physics, 0.9, 1.5, u1=1.0)
    _, _, e1, _ = steady_invariants(state, derived, physics)
    assert np.allclose(e1, 0.5 + physics.g * (0.9 + physics.r * 0.6))


def test_entropy_flux_vanishes_at_rest(rest_channel, physics) -> None:
    state, derived = _state(rest_channel, physics, 0.7, 1.2)
    density, flux = entropy(state, derived, pressure_terms(derived, rest_channel, physics), physics)
    assert np.all(flux == 0.0)
    assert np.all(np.isfinite(density))


def test_entropy_single_layer_limit(unit_channel) -> None:
    params = PhysicalParams(r=1e-12)
    state, derived = _state(unit_channel, params, 0.5, 1.0, u1=0.4, u2=0.3)
    p1, p2 = pressure_terms(derived, unit_channel, params)
    density, _ = entropy(state, derived, (p1, p2), params)
    layer1 = state.a1 * (0.5 * derived.u1**2 + params.g * derived.w2_hat) - p1
    assert np.allclose(density, layer1, rtol=1e-9)


def test_entropy_production_sign() -> None:
    earlier, later = _record(0.0, 10.0), _record(1.0, 9.0)
    assert entropy_production(earlier, later) == pytest.approx(-1.0)
    assert entropy_production(later, later) == 0.0
    with_outflow = entropy_production(_record(0.0, 10.0, 0.0, 2.0), _record(1.0, 9.0, 0.0, 2.0))
    assert with_outflow == pytest.approx(1.0)


def test_check_entropy_warns(caplog) -> None:
    with caplog.at_level(logging.WARNING, logger="twolayer"):
        check_entropy(_record(0.0, 1.0), _record(1.0, 2.0))
    assert any("Entropy production" in r.message for r in caplog.records)


def test_make_record(unit_channel, physics) -> None:
    state, derived = _state(unit_channel, physics, 0.4, 1.0, u1=0.2, u2=-0.1)
    record = make_record(state, derived, unit_channel, physics)
    assert record.mass1 == pytest.approx(0.4)
    assert record.mass2 == pytest.approx(0.6)
    assert record.max_du == pytest.approx(0.3)
    assert record.hyperbolic_loss_cells == ()
    assert len(record.csv_row()) == len(DIAGNOSTIC_COLUMNS)


def test_hyperbolic_loss_detected(unit_channel, physics) -> None:
    state, derived = _state(unit_channel, physics, 0.5, 1.0, u1=0.0, u2=3.0)
    assert hyperbolic_loss_cells(state, derived, physics).size == unit_channel.n_cells


def test_internal_wave_residual_exact_state(unit_channel, physics) -> None:
    state, derived = _state(unit_channel, physics, 0.9, 1.5, u1=0.3)
    e1_ref = 0.5 * 0.3**2 + physics.g * (0.9 + physics.r * 0.6)
    residual = internal_wave_residual(state, derived, physics, e1_ref, float(state.q1[0]), 1.5)
    assert residual["cubic"] < 1e-9
    assert residual["w2_flatness"] < 1e-12
    assert residual["q1_relative"] < 1e-12
    assert residual["e1_relative"] < 1e-12
    assert residual["is_internal_wave"] == 1.0


def test_internal_wave_residual_flags_moving_upper_layer(unit_channel, physics) -> None:
    state, derived = _state(unit_channel, physics, 0.9, 1.5, u1=0.3, u2=0.2)
    e1_ref = 0.5 * 0.3**2 + physics.g * (0.9 + physics.r * 0.6)
    residual = internal_wave_residual(state, derived, physics, e1_ref, float(state.q1[0]), 1.5)
    assert residual["is_internal_wave"] == 0.0


def test_jump_filtered_variation() -> None:
    values = np.array([0.0, 0.1, 0.2, 5.0, 5.1])
    assert jump_filtered_variation(values, 1.0) == pytest.approx(0.3)


def test_restrict_linear_profile() -> None:
    fine_x = np.linspace(0.0, 1.0, 9)
    fine = Snapshot(fine_x, {"v": 0.5 * (fine_x[1:] + fine_x[:-1])})
    coarse_x = np.linspace(0.0, 1.0, 5)
    restricted = restrict(fine, coarse_x)
    assert np.allclose(restricted["v"], 0.5 * (coarse_x[1:] + coarse_x[:-1]), atol=1e-14)
    assert np.allclose(fine.x_cells, fine.fields["v"])


def test_convergence_norms() -> None:
    x = np.linspace(0.0, 1.0, 5)
    snapshot = Snapshot(x, {"w1": np.array([1.0, 2.0, 3.0, 4.0]), "u1": np.zeros(4)})
    assert convergence_norms(snapshot, snapshot) == {"w1": 0.0, "u1": 0.0}
    shifted = Snapshot(x, {"w1": np.array([1.0, 2.0, 3.0, 5.0]), "u1": np.zeros(4)})
    assert convergence_norms(shifted, snapshot, ["w1"]) == {"w1": pytest.approx(0.25)}


def test_locate_jumps() -> None:
    x = np.linspace(0.0, 1.0, 101)
    values = np.where(x < 0.3, 1.0, 0.0) + np.where(x > 0.7, 2.0, 0.0)
    jumps = locate_jumps(x, values, 0.5)
    assert jumps.size == 2
    assert jumps[0] == pytest.approx(0.3, abs=0.01)
    assert jumps[1] == pytest.approx(0.7, abs=0.01)
    assert locate_jumps(x, np.zeros_like(x), 0.5).size == 0


def test_locate_waves_merges_fields() -> None:
    edges = np.linspace(0.0, 1.0, 101)
    x = 0.5 * (edges[1:] + edges[:-1])
    snapshot = Snapshot(
        edges,
        {
            "w1": np.where(x < 0.3, 1.0, 0.5),
            "w2": np.where(x < 0.31, 2.0, 1.5) + np.where(x > 0.7, 0.2, 0.0),
            "u1": np.zeros_like(x),
            "u2": np.zeros_like(x),
        },
    )
    waves = locate_waves(snapshot)
    assert waves.size == 2
    assert waves[0] == pytest.approx(0.305)
    assert waves[1] == pytest.approx(0.7)
    assert locate_waves(snapshot, names=("u1",)).size == 0
    assert locate_waves(snapshot, merge_distance=0.001).size == 3


def test_quasilinear_source_prismatic(unit_channel, physics) -> None:
    _, derived = _state(unit_channel, physics)
    s1, s2 = quasilinear_source(unit_channel, derived)
    assert np.allclose(s1, 0.0) and np.allclose(s2, 0.0)
