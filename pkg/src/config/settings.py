"""
Configuration settings for the MAVE-BO toolkit.
"""

import logging
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# Base directory of the project
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Output locations
RESULTS_DIR = os.getenv("HDBO_RESULTS_DIR", str(BASE_DIR / "results"))

# Logging
LOG_LEVEL = os.getenv("HDBO_LOG_LEVEL", "INFO").upper()

# Worker pool used to run seeds in parallel
HDBO_THREADS = os.getenv("HDBO_THREADS", "")

# Long-running trend experiments in the test suite
RUN_SLOW_TESTS = os.getenv("HDBO_RUN_SLOW", "0") == "1"

# Benchmark defaults
DEFAULT_BUDGET = int(os.getenv("HDBO_DEFAULT_BUDGET", "100"))
DEFAULT_SEED_COUNT = 20
BENCHMARK_DIMS = (20, 50, 100)

# Domains: the ball radius is 1 + eps_bar
BALL_EPSILON = 0.05
BALL_RADIUS = 1.0 + BALL_EPSILON
BOX_HALF_WIDTH = 1.0

# Alternating projection
PROJECTION_TOL = 1e-8
PROJECTION_MAX_ITER = 10_000
PROJECTION_STAGNATION_WINDOW = 10
PROJECTION_STAGNATION_RTOL = 1e-12

# GP nugget escalation, relative to the signal variance
NUGGET_START = 1e-10
NUGGET_MAX = 1e-4
NUGGET_GROWTH = 10.0

# Number of points in the deterministic scan used to locate f_max
FMAX_SCAN_LOG2 = 20


def worker_count() -> int:
    """
    Size of the worker pool for parallel seeds.

    HDBO_THREADS is read at call time so it can be changed between runs.

    Returns:
        Number of workers, at least 1
    """
    raw = os.getenv("HDBO_THREADS", HDBO_THREADS)
    default = os.cpu_count() or 1
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"Ignoring invalid HDBO_THREADS value {raw!r}, using {default}")
        return default
