"""Configuration management for submodmm."""

import os
from pathlib import Path

# Try to load .env file if it exists
env_file = Path(__file__).parent.parent / ".env"
if env_file.exists():
    with open(env_file) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                key, value = line.split("=", 1)
                os.environ.setdefault(key.strip(), value.strip())

# Configuration values
TOLERANCE = float(os.environ.get("SUBMODMM_TOLERANCE", "1e-9"))
BRUTE_FORCE_LIMIT = int(os.environ.get("SUBMODMM_BRUTE_FORCE_LIMIT", "20"))
MEMBERSHIP_LIMIT = int(os.environ.get("SUBMODMM_MEMBERSHIP_LIMIT", "16"))
KNAPSACK_DP_LIMIT = int(os.environ.get("SUBMODMM_KNAPSACK_DP_LIMIT", "10000000"))
JOBS = int(os.environ.get("SUBMODMM_JOBS", "1"))
