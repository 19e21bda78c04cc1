"""Command-line interface for the two-layer channel solver."""

from typing import Any, Dict, List, Optional
import argparse
import sys

from src.config.constants import DEFAULT_LOG_LEVEL, ScenarioName
from src.config.settings import load_config
from src.validation import (
    validate_cfl,
    validate_existing_file,
    validate_positive,
    validate_resolutions,
    validate_scenario,
)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        description="Two-layer shallow-water flow in channels of arbitrary cross-section"
    )

    parser.add_argument(
        "--log-level",
        type=str,
        choices=LOG_LEVELS,
        default=None,
        help=f"Logging level (default: LOG_LEVEL or {DEFAULT_LOG_LEVEL})",
    )
    parser.add_argument("--log-file", type=str, help="Also write the log to this file")
    parser.add_argument("--log-config", type=str, help="JSON logging configuration file")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # Run command
    run_parser = subparsers.add_parser("run", help="Run a scenario")
    run_parser.add_argument(
        "--scenario", type=str, choices=[s.value for s in ScenarioName], help="Scenario name"
    )
    run_parser.add_argument("--config", type=str, help="Path to configuration file")
    run_parser.add_argument("--cells", type=int, help="Number of grid cells")
    run_parser.add_argument("--cfl", type=float, help="CFL number in (0, 0.5]")
    run_parser.add_argument("--t-end", type=float, help="Final time")
    run_parser.add_argument("--output", type=str, help="Output directory")
    run_parser.add_argument("--perturbation", type=float, help="Initial perturbation amplitude")
    run_parser.add_argument(
        "--no-well-balance",
        action="store_true",
        help="Reconstruct areas directly instead of elevations",
    )
    run_parser.add_argument("--no-friction", action="store_true", help="Disable friction")
    run_parser.add_argument("--no-entrainment", action="store_true", help="Disable entrainment")
    run_parser.add_argument(
        "--check-conservation",
        action="store_true",
        help="Verify the per-step mass balance of each layer",
    )

    # Eigenvalue sweep command
    sweep_parser = subparsers.add_parser("sweep-eigen", help="Tabulate eigenvalues over eps = delta")
    sweep_parser.add_argument("--steps", type=int, default=10, help="Number of eps intervals")
    sweep_parser.add_argument(
        "--output", type=str, default="output/eigen_sweep.csv", help="Output CSV path"
    )

    # Convergence study command
    converge_parser = subparsers.add_parser("converge", help="Self-convergence study")
    converge_parser.add_argument("--scenario", type=str, required=True, help="Scenario name")
    converge_parser.add_argument("--config", type=str, help="Path to configuration file")
    converge_parser.add_argument(
        "--resolutions", type=str, required=True, help="Comma-separated cell counts"
    )
    converge_parser.add_argument("--reference", type=int, required=True, help="Reference cell count")
    converge_parser.add_argument("--t-end", type=float, help="Final time")
    converge_parser.add_argument(
        "--output", type=str, default="output/convergence.csv", help="Output CSV path"
    )

    return parser.parse_args(argv)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "scenario": getattr(args, "scenario", None),
        "t_end": getattr(args, "t_end", None),
    }
    if args.command != "run":
        return overrides
    overrides.update(
        {
            "n_cells": args.cells,
            "output_dir": args.output,
            "perturbation": args.perturbation,
            "scheme.nu": validate_cfl(args.cfl) if args.cfl is not None else None,
        }
    )
    if args.no_well_balance:
        overrides["scheme.well_balanced"] = False
    if args.no_friction:
        overrides["physics.friction_enabled"] = False
    if args.no_entrainment:
        overrides["physics.entrainment_enabled"] = False
    if args.check_conservation:
        overrides["check_conservation"] = True
    return overrides


def validate_cli_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Validate and process command-line arguments."""
    try:
        config: Dict[str, Any] = {"command": args.command}

        if args.command == "sweep-eigen":
            if args.steps < 1:
                raise ValueError(f"--steps must be at least 1, got {args.steps}")
            config["steps"] = args.steps
            config["output_path"] = args.output
            return config

        if args.command == "converge":
            validate_scenario(args.scenario)
            config["resolutions"] = validate_resolutions(args.resolutions)
            config["reference"] = validate_resolutions([args.reference])[0]
            config["output_path"] = args.output

        if getattr(args, "cells", None) is not None:
            validate_positive(args.cells, "cells")
        config_path = validate_existing_file(args.config) if args.config else None
        config["simulation"] = load_config(config_path, _overrides(args))
        return config

    except Exception as e:
        print(f"Error: {str(e)}", file=sys.stderr)
        sys.exit(1)


def main(argv: Optional[List[str]] = None) -> None:
    """Main CLI entry point."""
    args = parse_args(argv)
    if args.command is None:
        print("Error: a command is required (run, sweep-eigen, converge)", file=sys.stderr)
        sys.exit(1)

    from src.utils import setup_logging

    setup_logging(args.log_level, args.log_file, args.log_config)
    config = validate_cli_args(args)

    if args.command == "run":
        from src.main import run

        status = run(config["simulation"])
        if status != 0:
            sys.exit(status)

    elif args.command == "sweep-eigen":
        from src.main import eigen_sweep

        eigen_sweep(config["steps"], config["output_path"])
        print(config["output_path"])

    elif args.command == "converge":
        from src.main import convergence_study

        try:
            table = convergence_study(
                config["simulation"],
                config["resolutions"],
                config["reference"],
                output=config["output_path"],
            )
        except Exception as e:
            print(f"Error: {str(e)}", file=sys.stderr)
            sys.exit(1)
        for row in table:
            print(",".join(f"{value:.6e}" for value in row))


if __name__ == "__main__":
    main()
