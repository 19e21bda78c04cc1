"""
Main module for the two-layer channel solver.
Drives simulation runs, self-convergence studies, well-balance contrasts
and the eigenvalue sweep.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union
import asyncio
import logging
import sys

import numpy as np

from src.config.constants import (
    CONVERGENCE_COLUMNS,
    DIAGNOSTIC_COLUMNS,
    LOGGER_NAME,
    SNAPSHOT_COLUMNS,
    SWEEP_COLUMNS,
)
from src.config.settings import SimulationConfig
from src.diagnostics import (
    DiagnosticsRecord,
    Snapshot,
    check_entropy,
    convergence_norms,
    make_record,
)
from src.eigen import sweep_row
from src.geometry import ChannelGeometry
from src.scenarios import Scenario, build_scenario
from src.state import DerivedCellState, FlowState, derive_cells
from src.stepper import StepReport, step_ssprk2
from src.types import (
    ConfigurationError,
    FloatArray,
    GeometryError,
    HyperbolicityLossError,
    SolverError,
)
from src.utils import append_csv_rows, write_csv
from src.validation import validate_resolutions

logger: logging.Logger = logging.getLogger(f"{LOGGER_NAME}.main")

# Relative slack when matching the clock against requested output times.
_TIME_TOL: float = 1e-12


@dataclass(frozen=True, eq=False)
class RunResult:
    """Outcome of one simulation run."""

    scenario: Scenario
    state: FlowState
    derived: DerivedCellState
    report: Optional[StepReport]
    steps: int
    converged: bool = False
    min_a1: float = 0.0
    min_a2: float = 0.0
    snapshot_paths: Tuple[Path, ...] = ()
    diagnostics_path: Optional[Path] = None
    records: Tuple[DiagnosticsRecord, ...] = field(default_factory=tuple)

    @property
    def geometry(self) -> ChannelGeometry:
        return self.scenario.geometry

    @property
    def mass(self) -> Tuple[float, float]:
        dx = self.geometry.dx
        return float(np.sum(self.state.a1) * dx), float(np.sum(self.state.a2) * dx)

    def snapshot(self) -> Snapshot:
        return Snapshot(
            x_interfaces=self.geometry.x_interfaces,
            fields=snapshot_fields(self.state, self.derived, self.geometry),
            time=self.state.time,
        )

    def summary(self) -> str:
        mass1, mass2 = self.mass
        lines = [
            f"scenario: {self.scenario.name.value}",
            f"cells: {self.geometry.n_cells}",
            f"time: {self.state.time:.10g}",
            f"steps: {self.steps}",
            f"converged: {self.converged}",
            f"mass1: {mass1:.17g}",
            f"mass2: {mass2:.17g}",
            f"min_a1: {self.min_a1:.6e}",
            f"min_a2: {self.min_a2:.6e}",
        ]
        if self.report is not None:
            r = self.report
            lines += [
                f"last_dt: {r.dt:.6e}",
                f"max_speed: {r.max_speed:.6e}",
                f"rhs_norm: {r.rhs_norm:.6e}",
                f"tau_e: {r.tau_e:.6e}",
                f"tau_f: {r.tau_f:.6e}",
                f"hyperbolic_loss_cells: {r.hyperbolic_loss_count}",
            ]
        return "\n".join(lines)


def snapshot_fields(
    state: FlowState, derived: DerivedCellState, geometry: ChannelGeometry
) -> Dict[str, FloatArray]:
    """Per-cell output columns in snapshot order."""
    values = {
        "x": geometry.x_cells,
        "B": geometry.bottom_cell,
        "w1": derived.w1,
        "w2": derived.w2,
        "h1": derived.h1,
        "h2": derived.h2,
        "u1": derived.u1,
        "u2": derived.u2,
        "Q1": state.q1,
        "Q2": state.q2,
        "A1": state.a1,
        "A2": state.a2,
    }
    return {name: np.asarray(values[name], dtype=np.float64) for name in SNAPSHOT_COLUMNS}


def write_snapshot(
    path: Path, state: FlowState, derived: DerivedCellState, geometry: ChannelGeometry
) -> Path:
    fields = snapshot_fields(state, derived, geometry)
    rows = np.column_stack([fields[name] for name in SNAPSHOT_COLUMNS])
    write_csv(path, SNAPSHOT_COLUMNS, rows)
    logger.info(f"Wrote snapshot t={state.time:.6g} to {path}")
    return path


def _reached(time: float, target: float) -> bool:
    return time >= target - _TIME_TOL * max(1.0, abs(target))


def run_simulation(
    config: SimulationConfig,
    write_outputs: bool = True,
    initial_state: Optional[FlowState] = None,
) -> RunResult:
    """Integrate the configured scenario to ``t_end`` or to steady state.

    Snapshots are written at each requested output time and diagnostics rows
    appended as they are produced, so a failing run leaves its partial output.
    ``initial_state`` replaces the scenario's initial data; its clock restarts at zero.
    """
    scenario = build_scenario(config.scenario, config)
    if initial_state is not None:
        if initial_state.n_cells != scenario.geometry.n_cells:
            raise ConfigurationError(
                f"initial state has {initial_state.n_cells} cells, "
                f"the channel has {scenario.geometry.n_cells}",
                "n_cells",
            )
        scenario = replace(scenario, state=initial_state.with_time(0.0))
    geometry, physics, scheme = scenario.geometry, scenario.physics, scenario.scheme
    state = scenario.state
    name = scenario.name.value

    out_dir = Path(config.output_dir)
    diagnostics_path: Optional[Path] = None
    if write_outputs:
        out_dir.mkdir(parents=True, exist_ok=True)
        diagnostics_path = out_dir / f"{name}_diagnostics.csv"
        diagnostics_path.unlink(missing_ok=True)

    logger.info(
        f"Starting run: scenario={name}, cells={geometry.n_cells}, t_end={config.t_end}, "
        f"well_balanced={scheme.well_balanced}"
    )

    pending: List[float] = list(config.output_times)
    snapshots: List[Path] = []
    records: List[DiagnosticsRecord] = []
    report: Optional[StepReport] = None
    steps = 0
    converged = False
    min_a1 = float(state.a1.min())
    min_a2 = float(state.a2.min())

    def emit(current: FlowState) -> DerivedCellState:
        derived = derive_cells(current, geometry, physics, scheme.delta_A)
        record = make_record(current, derived, geometry, physics)
        if records:
            check_entropy(records[-1], record)
        if record.hyperbolic_loss_cells:
            logger.warning(
                f"Hyperbolicity lost in {len(record.hyperbolic_loss_cells)} cells "
                f"at t={current.time:.6g}"
            )
        records.append(record)
        if write_outputs and diagnostics_path is not None:
            append_csv_rows(diagnostics_path, DIAGNOSTIC_COLUMNS, [record.csv_row()])
            path = out_dir / f"{name}_snapshot_{len(snapshots):03d}_t{current.time:.6g}.csv"
            snapshots.append(write_snapshot(path, current, derived, geometry))
        return derived

    while True:
        while pending and _reached(state.time, pending[0]):
            emit(state)
            pending.pop(0)
        if _reached(state.time, config.t_end) or converged:
            break
        if config.max_steps is not None and steps >= config.max_steps:
            logger.warning(f"Stopping after max_steps={config.max_steps} at t={state.time:.6g}")
            break

        target = pending[0] if pending else config.t_end
        state, report = step_ssprk2(
            state,
            geometry,
            physics,
            scheme,
            scenario.boundary,
            dt_max=target - state.time,
            check_conservation=config.check_conservation,
        )
        if _reached(state.time, target):
            state = state.with_time(target)
        steps += 1
        min_a1 = min(min_a1, float(state.a1.min()))
        min_a2 = min(min_a2, float(state.a2.min()))

        if report.dt_fallback:
            logger.debug(f"Step {steps} used the fallback time step")
        if config.strict_hyperbolicity and report.hyperbolic_loss_count:
            raise HyperbolicityLossError(
                f"hyperbolicity lost in cells {list(report.hyperbolic_loss_cells)}",
                cells=report.hyperbolic_loss_cells,
                time=state.time,
            )
        if config.run_to_steady and report.rhs_norm < config.steady_tol:
            converged = True
            logger.info(
                f"Converged to steady state at t={state.time:.6g} "
                f"(rhs norm {report.rhs_norm:.3e} < {config.steady_tol:.1e})"
            )

    if converged or not records or records[-1].time != state.time:
        derived = emit(state)
    else:
        derived = derive_cells(state, geometry, physics, scheme.delta_A)

    logger.info(f"Finished run: scenario={name}, t={state.time:.6g}, steps={steps}")
    return RunResult(
        scenario=scenario,
        state=state,
        derived=derived,
        report=report,
        steps=steps,
        converged=converged,
        min_a1=min_a1,
        min_a2=min_a2,
        snapshot_paths=tuple(snapshots),
        diagnostics_path=diagnostics_path,
        records=tuple(records),
    )


def run(config: SimulationConfig) -> int:
    """Run a simulation, print its summary and return the process exit status."""
    try:
        result = run_simulation(config)
    except (SolverError, GeometryError, ConfigurationError) as e:
        logger.error(f"Run failed: {str(e)}")
        print(f"Error: {str(e)}", file=sys.stderr)
        return 1
    print(result.summary())
    return 0


async def _run_resolutions(
    config: SimulationConfig, resolutions: Sequence[int]
) -> List[RunResult]:
    tasks = [
        asyncio.to_thread(
            run_simulation,
            config.model_copy(update={"n_cells": n, "output_times": (config.t_end,)}),
            False,
        )
        for n in resolutions
    ]
    return list(await asyncio.gather(*tasks))


def convergence_study(
    config: SimulationConfig,
    resolutions: Sequence[int],
    reference: int,
    output: Optional[Union[str, Path]] = None,
    names: Sequence[str] = CONVERGENCE_COLUMNS[1:],
) -> FloatArray:
    """L1 errors of each resolution against a fine reference run.

    Returns one row per resolution: ``n_cells`` followed by the errors of
    ``names``.  Resolutions run concurrently as independent jobs.
    """
    resolutions = validate_resolutions(resolutions)
    reference = validate_resolutions([reference])[0]
    if config.geometry_file is not None:
        raise ConfigurationError(
            "convergence study needs a builtin channel, not a tabulated one", "geometry_file"
        )

    to_run = sorted({reference, *resolutions})
    logger.info(f"Convergence study: resolutions={list(resolutions)}, reference={reference}")
    results = dict(zip(to_run, asyncio.run(_run_resolutions(config, to_run))))
    fine = results[reference].snapshot()

    rows = []
    for n in resolutions:
        norms = convergence_norms(results[n].snapshot(), fine, names)
        rows.append([float(n), *(norms[name] for name in names)])
        logger.info(f"N={n}: " + ", ".join(f"{k}={v:.3e}" for k, v in norms.items()))
    table = np.array(rows, dtype=np.float64)
    if output is not None:
        write_csv(output, ["n_cells", *names], table)
    return table


def restart_from_state(
    config: SimulationConfig,
    state: FlowState,
    well_balanced: bool,
    duration: float,
) -> RunResult:
    """Continue ``state`` for ``duration`` with the chosen reconstruction, without output files."""
    restart = config.model_copy(
        update={
            "t_end": duration,
            "output_times": (0.0, duration),
            "run_to_steady": False,
            "max_steps": None,
            "scheme": config.scheme.model_copy(update={"well_balanced": well_balanced}),
        }
    )
    return run_simulation(restart, write_outputs=False, initial_state=state)


def well_balance_contrast(
    config: SimulationConfig, duration: float
) -> Tuple[RunResult, RunResult, RunResult]:
    """Converge ``config`` to its steady state, then continue it with and without well-balance.

    Returns ``(steady, well_balanced, area_reconstructed)``.
    """
    if duration <= 0.0:
        raise ConfigurationError(f"duration must be positive, got {duration}", "duration")
    steady = run_simulation(
        config.model_copy(update={"run_to_steady": True, "output_times": (0.0,)}),
        write_outputs=False,
    )
    if not steady.converged:
        logger.warning(
            f"No steady state reached by t={steady.state.time:.6g}; contrasting the final state"
        )
    kept = restart_from_state(config, steady.state, True, duration)
    drifted = restart_from_state(config, steady.state, False, duration)
    logger.info(
        f"Steady-state drift after {duration:g}: well-balanced {steady_drift(steady, kept):.3e}, "
        f"area reconstruction {steady_drift(steady, drifted):.3e}"
    )
    return steady, kept, drifted


def steady_drift(reference: RunResult, result: RunResult) -> float:
    """Largest change of any conserved variable between two runs on the same channel."""
    return float(np.max(np.abs(result.state.as_array() - reference.state.as_array())))


def eigen_sweep(
    steps: int = 10, output: Optional[Union[str, Path]] = None, eps_max: float = 0.5
) -> FloatArray:
    """Eigenvalue table over eps = delta on ``steps`` equal intervals of [0, eps_max]."""
    if steps < 1:
        raise ConfigurationError(f"steps must be at least 1, got {steps}", "steps")
    rows = np.vstack([sweep_row(float(eps)) for eps in np.linspace(0.0, eps_max, steps + 1)])
    if output is not None:
        write_csv(output, SWEEP_COLUMNS, rows)
        logger.info(f"Wrote eigenvalue sweep ({rows.shape[0]} rows) to {output}")
    return rows
