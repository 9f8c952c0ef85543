"""
Runtime configuration for the solver, benchmark runner and command line.

- Loads an optional `.env` file from the working directory.
- Exposes typed defaults read from `MNGN_*` environment variables.
- Rejects values the solver could not work with at import time.
"""

import os
from dotenv import load_dotenv

load_dotenv()

STOP_TOL = float(os.getenv("MNGN_STOP_TOL", 1e-8))
if STOP_TOL <= 0:
    raise ValueError("MNGN_STOP_TOL must be positive.")

MAX_ITER = int(os.getenv("MNGN_MAX_ITER", 500))
if MAX_ITER < 1:
    raise ValueError("MNGN_MAX_ITER must be at least 1.")

SEED = int(os.getenv("MNGN_SEED", 0))
TRIALS = int(os.getenv("MNGN_TRIALS", 100))
if TRIALS < 1:
    raise ValueError("MNGN_TRIALS must be at least 1.")

JOBS = int(os.getenv("MNGN_JOBS", 1))
LOG_LEVEL = os.getenv("MNGN_LOG_LEVEL", "WARNING").upper()
LOG_BASE = os.getenv("MNGN_LOG_BASE", "base-10")
if LOG_BASE not in ("natural", "base-10"):
    raise ValueError("MNGN_LOG_BASE must be natural or base-10.")

# Rank gap heuristic
RANK_GAP_RATIO = 1e2
RANK_VALUE_FLOOR = 1e-8

# Residual-increase controller
ETA_INIT = 0.125
K_RES = 5
SLOPE_MIN = -1e-2
SLOPE_MAX = -0.5
ETA_MAX = 2.0 ** 10

BETA_FLOOR = 1e-8
ARMIJO_MAX_HALVINGS = 30

X0_LOW = -5.0
X0_HIGH = 5.0
