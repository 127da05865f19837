import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Optional environment configuration; nothing is required to run
_logs_path = os.environ.get("ILR_APPROX_LOGS_PATH")
LOGS_PATH = Path(_logs_path) if _logs_path else None
LOG_LEVEL = os.environ.get("ILR_APPROX_LOG_LEVEL", "INFO").upper()

# Numerical tolerances
SIMPLEX_TOL = 1e-12
ORTHONORMAL_TOL = 1e-12
SYMMETRY_TOL = 1e-8
PSD_TOL = 1e-10

# Cyclic Jacobi settings
JACOBI_MAX_SWEEPS = 100
JACOBI_REL_THRESHOLD = 1e-14

# Simulation defaults
DEFAULT_N_DRAWS = 10000
QUICK_N_DRAWS = 2000
DEFAULT_ZERO_REPLACEMENT = 0.5
DEFAULT_MASTER_SEED = 20240517
MAX_ENUMERATED_COMPOSITIONS = 1_000_000
ENUMERATED_MASS_TOL = 1e-9

# Simulation grid of the reference study
REFERENCE_ALPHA_TILDE = (0.01, 0.04, 0.15, 0.30, 0.50)
REFERENCE_ALPHA_S = (101.0, 1000.0, 10000.0, 100000.0, 1000000.0)
REFERENCE_TOTALS = (101, 1000, 10000, 100000, 1000000)
REFERENCE_SIGMA_SQ = (0.1, 1.0)
