"""Constants and configuration values."""
from typing import Final, Tuple
from enum import Enum

# Logging Configuration
LOGGER_NAME: Final[str] = "twolayer"
DEFAULT_LOG_LEVEL: Final[str] = "INFO"
LOG_FORMAT: Final[str] = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Physical defaults
GRAVITY: Final[float] = 9.81
DEFAULT_DENSITY_RATIO: Final[float] = 0.98

# Scheme defaults
DEFAULT_N_CELLS: Final[int] = 200
DEFAULT_CFL: Final[float] = 0.45
MAX_CFL: Final[float] = 0.5
DEFAULT_ALPHA: Final[float] = 1.3
DEFAULT_DELTA_B: Final[float] = 1e-3
DEFAULT_DELTA_A: Final[float] = 1e-12
DEFAULT_DZ: Final[float] = 0.01

# Numerical tolerances
INVERSION_MAX_ITER: Final[int] = 100
INVERSION_XTOL: Final[float] = 1e-14
SPEED_GAP_TOL: Final[float] = 1e-14  # a+ - a- below this is a dry interface
ENTRAINMENT_MIN_AREA: Final[float] = 1e-6  # external layer cutoff (m^2)
POSITIVITY_ROUNDOFF: Final[float] = 1e-14
HYPERBOLIC_IMAG_TOL: Final[float] = 1e-9
ENTROPY_SOFT_TOL: Final[float] = 1e-6
CONSERVATION_TOL: Final[float] = 1e-12
STEADY_RHS_TOL: Final[float] = 1e-8
CRITICAL_FROUDE: Final[float] = 1.0

# Entrainment closure V_e = k G^2 / (G^2 + ENTRAINMENT_FROUDE_SHIFT) u1
ENTRAINMENT_FROUDE_SHIFT: Final[float] = 5.0
# Friction resolution factor in the CFL law (>= 10 steps per 1/tau_f at nu=1/2)
FRICTION_CFL_FACTOR: Final[float] = 5.0

# CSV layout
CSV_PRECISION: Final[str] = "%.17g"
SNAPSHOT_COLUMNS: Final[Tuple[str, ...]] = (
    "x", "B", "w1", "w2", "h1", "h2", "u1", "u2", "Q1", "Q2", "A1", "A2",
)
DIAGNOSTIC_COLUMNS: Final[Tuple[str, ...]] = (
    "time", "mass1", "mass2", "max_u1", "max_u2", "max_du", "entropy",
    "hyperbolic_loss",
)
SWEEP_COLUMNS: Final[Tuple[str, ...]] = (
    "eps",
    "root1", "root2", "root3", "root4", "max_imag",
    "ext_minus", "int_minus", "int_plus", "ext_plus",
    "gamma1_minus", "gamma1_plus", "gamma2_minus", "gamma2_plus",
)
CONVERGENCE_COLUMNS: Final[Tuple[str, ...]] = ("n_cells", "w1", "w2", "u1", "u2")


class BoundaryMode(Enum):
    """How a boundary is classified."""
    AUTOMATIC = "automatic"
    INFLOW = "inflow"
    OUTFLOW = "outflow"


class Side(Enum):
    """Domain boundary side."""
    LEFT = "left"
    RIGHT = "right"


class ScenarioName(Enum):
    """Builtin experiments."""
    RIEMANN = "riemann"
    REST_PERTURBATION = "rest_perturbation"
    INTERNAL_WAVE = "internal_wave"
    INTERNAL_WAVE_PERTURBATION = "internal_wave_perturbation"
    LOCK_EXCHANGE = "lock_exchange"
    GRAVITY_CURRENT = "gravity_current"
