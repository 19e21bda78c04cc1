"""Test utilities and helper functions."""

from pathlib import Path
import json
import logging

import numpy as np
import pytest

from src.config.constants import LOGGER_NAME
from src.config.logging_config import default_logging_config
from src.utils import append_csv_rows, read_csv, setup_logging, write_csv


def test_setup_logging_levels(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test log level selection."""
    logger = setup_logging("debug")
    assert logger.name == LOGGER_NAME
    assert logger.level == logging.DEBUG

    monkeypatch.setenv("LOG_LEVEL", "ERROR")
    assert setup_logging().level == logging.ERROR

    monkeypatch.setenv("LOG_LEVEL", "LOUD")
    assert setup_logging().level == logging.INFO


def test_setup_logging_file(tmp_path: Path) -> None:
    """Test that a log file receives package messages."""
    log_file = tmp_path / "logs" / "run.log"
    logger = setup_logging("INFO", str(log_file))
    logging.getLogger(f"{LOGGER_NAME}.stepper").info("step done")
    for handler in logger.handlers:
        handler.flush()
    assert "step done" in log_file.read_text()
    setup_logging("INFO")


def test_setup_logging_config_file(tmp_path: Path) -> None:
    """Test loading a JSON dictConfig file."""
    config = default_logging_config("WARNING")
    config_file = tmp_path / "logging.json"
    config_file.write_text(json.dumps(config))
    assert setup_logging(config_file=str(config_file)).level == logging.WARNING
    setup_logging("INFO")


def test_default_logging_config(tmp_path: Path) -> None:
    """Test the default handler layout."""
    config = default_logging_config("DEBUG", tmp_path / "run.log")
    assert config["loggers"][LOGGER_NAME]["handlers"] == ["console", "file"]
    assert config["handlers"]["file"]["level"] == "DEBUG"
    assert not config["loggers"]["py.warnings"]["propagate"]
    assert default_logging_config("INFO")["loggers"][LOGGER_NAME]["handlers"] == ["console"]


def test_csv_roundtrip(tmp_path: Path) -> None:
    """Test writing, appending and reading tables."""
    path = tmp_path / "nested" / "table.csv"
    write_csv(path, ["a", "b"], np.array([[1.0, 2.0], [3.0, 1.0 / 3.0]]))
    assert path.read_text().splitlines()[0] == "a,b"

    append_csv_rows(path, ["a", "b"], [[5.0, 6.0]])
    columns = read_csv(path)
    assert columns["a"].tolist() == [1.0, 3.0, 5.0]
    assert columns["b"][1] == 1.0 / 3.0

    fresh = tmp_path / "fresh.csv"
    append_csv_rows(fresh, ["t"], [[0.5]])
    assert read_csv(fresh)["t"].tolist() == [0.5]

    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", ["a", "b", "c"], np.zeros((2, 2)))
