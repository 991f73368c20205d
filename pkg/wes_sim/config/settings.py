"""
Configuration module for the WES scheduling simulator.

Values come from environment variables (optionally loaded from a .env file).
Structured run configuration (clusters, policies, profiles) lives in JSON
documents validated by pydantic; these module constants only hold defaults.
"""

import os

# Load environment variables from .env file (if present)
# This must happen before any os.getenv() calls
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # python-dotenv not installed, skip .env loading
    pass

# --- Logging Configuration ---
LOG_LEVEL = os.getenv("WES_SIM_LOG_LEVEL", "INFO").upper()

# --- Directory Configuration ---
OUTPUT_DIR = os.getenv("WES_SIM_OUTPUT_DIR", "sim_out")
# None means "use the bundled default profile"
PROFILES_PATH = os.getenv("WES_SIM_PROFILES_PATH") or None

# --- Simulation Defaults ---
DEFAULT_CLUSTER = os.getenv("WES_SIM_DEFAULT_CLUSTER", "YC")
MEM_SPILL_FACTOR = float(os.getenv("WES_SIM_MEM_SPILL_FACTOR", "10.0"))
SWEEP_WORKERS = int(os.getenv("WES_SIM_SWEEP_WORKERS", "1"))

# --- Cost Model Configuration ---
HOURS_PER_YEAR = float(os.getenv("WES_SIM_HOURS_PER_YEAR", "8760"))

# --- Calibration Configuration ---
FIT_TOLERANCE = float(os.getenv("WES_SIM_FIT_TOLERANCE", "0.20"))
FIT_MAX_ROUNDS = int(os.getenv("WES_SIM_FIT_MAX_ROUNDS", "12"))
FIT_MIN_STEP = float(os.getenv("WES_SIM_FIT_MIN_STEP", "1e-4"))
