"""Configure logging for the solver."""
from typing import Dict, Any, Optional
import logging
import logging.config
from pathlib import Path
import json

from src.config.constants import LOGGER_NAME, LOG_FORMAT, DEFAULT_LOG_LEVEL


def default_logging_config(level: str, log_file: Optional[Path] = None) -> Dict[str, Any]:
    """dictConfig for the package logger: stderr, plus a file when given."""
    handlers: Dict[str, Dict[str, Any]] = {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "standard",
            "level": level,
            "stream": "ext://sys.stderr",
        }
    }
    if log_file:
        handlers["file"] = {
            "class": "logging.FileHandler",
            "filename": str(log_file),
            "formatter": "standard",
            "level": level,
        }
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"standard": {"format": LOG_FORMAT}},
        "handlers": handlers,
        "loggers": {
            LOGGER_NAME: {"handlers": list(handlers), "level": level, "propagate": True},
            # numpy floating-point warnings arrive through the warnings module
            "py.warnings": {"handlers": ["console"], "level": "WARNING", "propagate": False},
        },
    }


def configure_logging(
    log_level: Optional[str] = None,
    log_file: Optional[Path] = None,
    config_file: Optional[Path] = None,
    capture_warnings: bool = True,
) -> logging.Logger:
    """Configure solver logging from a JSON dictConfig file or the defaults."""
    if config_file and config_file.exists():
        with open(config_file) as f:
            config: Dict[str, Any] = json.load(f)
        logging.config.dictConfig(config)
    else:
        if log_file:
            log_file.parent.mkdir(parents=True, exist_ok=True)
        logging.config.dictConfig(
            default_logging_config(log_level or DEFAULT_LOG_LEVEL, log_file)
        )
    logging.captureWarnings(capture_warnings)
    return logging.getLogger(LOGGER_NAME)
