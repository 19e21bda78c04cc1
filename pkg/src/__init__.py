"""Two-layer shallow-water channel solver package."""
import logging

# Version information
__version__: str = "0.1.0"

# Initialize package-level logger
logger: logging.Logger = logging.getLogger("twolayer")
