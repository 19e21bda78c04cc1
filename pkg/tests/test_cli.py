"""Test command-line interface functionality."""

from typing import Dict, Any
from unittest.mock import patch
from pathlib import Path
import argparse

import numpy as np
import pytest

from src.cli import parse_args, validate_cli_args, main
from src.config.constants import ScenarioName


def test_parse_args() -> None:
    """Test argument parsing."""
    args: argparse.Namespace = parse_args(
        ["--log-level", "DEBUG", "run", "--scenario", "riemann", "--cells", "40", "--no-friction"]
    )
    assert args.log_level == "DEBUG"
    assert args.command == "run"
    assert args.scenario == "riemann"
    assert args.cells == 40
    assert args.no_friction
    assert not args.no_well_balance

    args = parse_args(["sweep-eigen"])
    assert args.steps == 10
    assert args.output == "output/eigen_sweep.csv"

    with pytest.raises(SystemExit):
        parse_args(["run", "--scenario", "tsunami"])


def test_validate_cli_args(tmp_path: Path) -> None:
    """Test CLI argument validation."""
    args = parse_args(
        [
            "run", "--scenario", "lock_exchange", "--cells", "64", "--cfl", "0.4",
            "--t-end", "1.0", "--output", str(tmp_path), "--no-well-balance",
            "--no-friction", "--check-conservation",
        ]
    )
    config: Dict[str, Any] = validate_cli_args(args)
    simulation = config["simulation"]
    assert config["command"] == "run"
    assert simulation.scenario is ScenarioName.LOCK_EXCHANGE
    assert simulation.n_cells == 64
    assert simulation.scheme.nu == pytest.approx(0.4)
    assert simulation.t_end == pytest.approx(1.0)
    assert not simulation.scheme.well_balanced
    assert not simulation.physics.friction_enabled
    assert simulation.check_conservation
    assert simulation.output_dir == tmp_path

    config_file = tmp_path / "run.cfg"
    config_file.write_text("scenario = riemann\nn_cells = 32\n")
    config = validate_cli_args(parse_args(["run", "--config", str(config_file), "--cells", "16"]))
    assert config["simulation"].n_cells == 16

    config = validate_cli_args(
        parse_args(["converge", "--scenario", "riemann", "--resolutions", "8,16", "--reference", "64"])
    )
    assert config["resolutions"] == [8, 16]
    assert config["reference"] == 64
    assert config["output_path"] == "output/convergence.csv"


def test_validate_cli_args_errors(tmp_path: Path, capsys) -> None:
    """Test that invalid arguments exit with status 1."""
    bad = [
        ["run", "--scenario", "riemann", "--cfl", "0.7"],
        ["run"],
        ["run", "--config", str(tmp_path / "missing.cfg")],
        ["sweep-eigen", "--steps", "0"],
        ["converge", "--scenario", "riemann", "--resolutions", "8,x", "--reference", "64"],
    ]
    for argv in bad:
        with pytest.raises(SystemExit) as info:
            validate_cli_args(parse_args(argv))
        assert info.value.code == 1
    assert "Error:" in capsys.readouterr().err


def test_main_run(tmp_path: Path) -> None:
    """Test the run command dispatch and exit status."""
    argv = ["run", "--scenario", "riemann", "--output", str(tmp_path)]
    with patch("src.main.run", return_value=0) as mock_run:
        main(argv)
        assert mock_run.call_args.args[0].scenario is ScenarioName.RIEMANN

    with patch("src.main.run", return_value=1):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 1


def test_main_sweep_and_converge(capsys) -> None:
    """Test the sweep-eigen and converge commands."""
    with patch("src.main.eigen_sweep") as mock_sweep:
        main(["sweep-eigen", "--steps", "4", "--output", "sweep.csv"])
        mock_sweep.assert_called_once_with(4, "sweep.csv")
    assert "sweep.csv" in capsys.readouterr().out

    table = np.array([[8.0, 0.1, 0.2, 0.3, 0.4]])
    with patch("src.main.convergence_study", return_value=table):
        main(["converge", "--scenario", "riemann", "--resolutions", "8", "--reference", "32"])
    assert capsys.readouterr().out.startswith("8.000000e+00,1.000000e-01")

    with patch("src.main.convergence_study", side_effect=RuntimeError("boom")):
        with pytest.raises(SystemExit):
            main(["converge", "--scenario", "riemann", "--resolutions", "8", "--reference", "32"])


def test_main_requires_command() -> None:
    """Test that a missing command is an error."""
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1
