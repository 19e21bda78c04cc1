"""End-to-end runs of the builtin experiments."""

import numpy as np
import pytest

from src.config.constants import ScenarioName
from src.config.settings import SimulationConfig, load_config
from src.diagnostics import hyperbolic_loss_cells, locate_waves, steady_invariants
from src.main import (
    RunResult,
    convergence_study,
    run_simulation,
    steady_drift,
    well_balance_contrast,
)

pytestmark = [pytest.mark.slow, pytest.mark.integration]


def _run(scenario: str, **overrides) -> RunResult:
    config: SimulationConfig = load_config(overrides={"scenario": scenario, **overrides})
    return run_simulation(config, write_outputs=False)


def _max_speed(result: RunResult) -> float:
    return max(float(np.max(np.abs(result.derived.u1))), float(np.max(np.abs(result.derived.u2))))


def test_rest_state_is_preserved() -> None:
    result = _run("rest_perturbation", n_cells=200, perturbation=0.0, output_times=(0.0, 1.0, 5.0))

    assert result.state.time == pytest.approx(5.0)
    assert all(max(r.max_u1, r.max_u2) <= 1e-12 for r in result.records)
    assert np.max(np.abs(result.derived.w2 - 1.2)) / 1.2 < 1e-13


def test_perturbation_decays() -> None:
    result = _run("rest_perturbation", n_cells=200, output_times=(0.0, 5.0))

    assert _max_speed(result) <= 1e-3
    assert result.records[-1].max_du <= 5e-3


def test_area_reconstruction_loses_rest() -> None:
    result = _run(
        "rest_perturbation",
        n_cells=200,
        perturbation=0.0,
        t_end=0.1,
        output_times=(0.0, 0.1),
        **{"scheme.well_balanced": False},
    )

    assert _max_speed(result) >= 1e-3


def test_riemann_self_convergence() -> None:
    config = load_config(overrides={"scenario": "riemann", "t_end": 0.12})
    table = convergence_study(config, [100, 200, 400], 1600)

    errors = table[:, 1:]
    assert np.all(errors[1:] < errors[:-1])


def test_riemann_has_four_jumps_one_moving_left() -> None:
    result = _run("riemann", n_cells=1000)

    waves = locate_waves(result.snapshot())
    assert result.state.time == pytest.approx(0.12)
    assert waves.size == 4
    # the membrane sat at x = 0.2
    assert int(np.sum(waves < 0.2)) == 1


@pytest.mark.parametrize("scenario", [name.value for name in ScenarioName])
def test_mass_balance_checked_every_step(scenario: str) -> None:
    result = _run(
        scenario,
        n_cells=100,
        max_steps=40,
        check_conservation=True,
        **{"physics.entrainment_enabled": False},
    )

    assert result.steps > 0
    assert result.min_a1 >= 0.0 and result.min_a2 >= 0.0


def test_lock_exchange_reaches_steady_state() -> None:
    result = _run("lock_exchange", n_cells=200)

    assert result.state.time == pytest.approx(50.0)
    assert result.min_a1 >= 0.0 and result.min_a2 >= 0.0
    assert np.all(result.derived.h1 >= 0.0) and np.all(result.derived.h2 >= 0.0)
    assert result.report is not None and result.report.rhs_norm < 1e-6


def test_lock_exchange_layers_move_apart() -> None:
    result = _run("lock_exchange", n_cells=200, t_end=1.0, output_times=(0.0, 1.0))

    derived = result.derived
    both = (derived.h1 > 0.05) & (derived.h2 > 0.05)
    assert np.any(both)
    # dense layer runs left along the bottom, light layer right on top
    assert np.sum(result.state.q1[both]) < 0.0 < np.sum(result.state.q2[both])


def test_internal_wave_flat_free_surface() -> None:
    result = _run("internal_wave", n_cells=200)

    w2 = result.derived.w2
    assert np.max(np.abs(w2 - 1.5)) < 1e-3
    q1 = result.state.q1
    assert np.max(np.abs(q1 - np.mean(q1))) / np.max(np.abs(q1)) < 1e-3


def test_internal_wave_energy_and_loss_cells() -> None:
    result = _run("internal_wave", n_cells=200)
    physics = result.scenario.physics

    _, _, e1, _ = steady_invariants(result.state, result.derived, physics)
    loss = hyperbolic_loss_cells(result.state, result.derived, physics)
    kept = np.ones(e1.size, dtype=bool)
    kept[loss] = False
    assert np.ptp(e1[kept]) / abs(float(np.mean(e1[kept]))) < 1e-2

    speed = np.abs(result.derived.u1)
    fastest = speed >= np.quantile(speed, 0.9)
    assert np.all(fastest[loss])


def test_entrainment_raises_internal_mass() -> None:
    with_entrainment = _run("gravity_current", n_cells=200)
    without = _run("gravity_current", n_cells=200, **{"physics.entrainment_enabled": False})

    assert with_entrainment.mass[0] > without.mass[0]
    assert with_entrainment.min_a1 >= 0.0 and without.min_a1 >= 0.0


def test_entrainment_raises_front() -> None:
    with_entrainment = _run("gravity_current", n_cells=200)
    without = _run("gravity_current", n_cells=200, **{"physics.entrainment_enabled": False})

    assert without.state.time == pytest.approx(2.0)
    x = without.geometry.x_cells
    wet = np.flatnonzero(without.derived.h1 > 1e-2)
    assert wet.size > 0
    start, front = x[wet[0]], x[wet[-1]]
    near_front = (x >= front - 0.1 * (front - start)) & (x <= front)
    assert np.all(with_entrainment.derived.w1[near_front] >= without.derived.w1[near_front] - 1e-12)


def test_well_balance_contrast_on_internal_wave() -> None:
    config = load_config(overrides={"scenario": "internal_wave", "n_cells": 200})
    steady, kept, drifted = well_balance_contrast(config, 1.0)

    assert steady.converged
    assert kept.state.time == pytest.approx(1.0)
    assert steady_drift(steady, kept) < 1e-6
    assert steady_drift(steady, drifted) > 100.0 * steady_drift(steady, kept)
