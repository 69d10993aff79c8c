import os
from pathlib import Path


# Project root (1 level up from this file)
PROJECT_ROOT = Path(__file__).resolve().parents[1]
PACKAGE_DIR = PROJECT_ROOT / "bm_census"

# Exported reports and catalog dumps
OUTPUT_DIR = Path(os.environ.get("BM_CENSUS_OUTPUT_DIR", PROJECT_ROOT / "output"))

# Worker count for sharded searches (read lazily by utils.resolve_jobs)
JOBS_ENV_VAR = "BM_CENSUS_JOBS"

# Term alphabet
VARIABLES = ("x", "y", "z")
MID_DOTS = ("·", ".")  # accepted interchangeably in compact text
MID_DOT = "·"  # emitted by the formatter

# Order limits
MIN_ORDER = 1
MAX_ORDER = 5
MAX_CLASS_ORDER = 4  # class counting materializes canonical forms
UNGATED_CLASS_ORDER = 3  # above this, class counting needs an explicit flag

# Search tuning
NAIVE_CHUNK = 1 << 16  # tables per vectorized naive batch
CANONICAL_CHUNK = 1 << 18  # keys per vectorized canonical-form batch
SHARDS_PER_JOB = 4
PARALLEL_MIN_ORDER = 4  # smaller searches run inline unless shard_cells is set
STREAM_PREFIX_CELLS = 4  # streamed searches emit at most n^(n²-4) tables per shard
NAIVE_STREAM_SPAN = 1 << 20  # tables per streamed naive shard
