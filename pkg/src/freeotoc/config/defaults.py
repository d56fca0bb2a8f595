"""Centralized default values for all configuration.

Every cap, tolerance and Monte Carlo default lives here so there is exactly
ONE place to look up or change it.  Library functions use these constants
as keyword defaults; the Settings model in ``settings.py`` references them
as field defaults.
"""
from __future__ import annotations

# ── Enumeration caps ────────────────────────────────────────────────
DEFAULT_ENUMERATION_CAP = 8  # k! = 40320 elements
DEFAULT_COUNTING_CAP = 10  # NC(k) elements and multichain counts
DEFAULT_PAIR_ENUMERATION_CAP = 7  # genus-one pairs materialized
DEFAULT_PAIR_COUNTING_CAP = 8  # genus-one pairs streamed
DEFAULT_MOMENT_ORDER_CAP = 12  # moment/cumulant conversions (C_12 = 208012 partitions)

# ── Weingarten tables ───────────────────────────────────────────────
DEFAULT_TABLE_CAP = 6  # full (k!)^2 Gram / Weingarten tables
DEFAULT_EXACT_TRANSFER_CAP = 4  # rational transfer contractions, floats above
DEFAULT_TRANSFER_CAP = 6
DEFAULT_REPLICA_DIM_CAP = 4096  # D^k for the explicit twirl
DEFAULT_WG_CACHE_ENABLED = False
DEFAULT_WG_CACHE_PATH = "~/.cache/free-otoc/weingarten.json"
DEFAULT_WG_CACHE_FORMAT = "free-otoc/weingarten"
DEFAULT_WG_CACHE_VERSION = 1

# ── Monte Carlo ─────────────────────────────────────────────────────
DEFAULT_DENSE_DIM_CAP = 256  # complex double, D x D
DEFAULT_MC_SAMPLES = 10_000
DEFAULT_MC_SEED = 20240917
DEFAULT_MC_WORKERS = 1
DEFAULT_STDERR_SIGMAS = 4.0
DEFAULT_FRAME_MIN_SAMPLES = 100
DEFAULT_FRAME_REL_STDERR_WARN = 0.10  # heavy tail guidance above this
DEFAULT_IMAG_TOLERANCE = 1e-10
DEFAULT_HERMITIAN_TOLERANCE = 1e-12
DEFAULT_UNITARITY_TOLERANCE = 1e-10

# ── Identity check ──────────────────────────────────────────────────
DEFAULT_IDENTITY_RTOL = 1e-10
DEFAULT_PAULI_ASSIGNMENT_CAP = 1 << 24

# ── Output ──────────────────────────────────────────────────────────
DEFAULT_OUTPUT_DIR = "results"
DEFAULT_FLOAT_FORMAT = ".12g"
DEFAULT_RESULTS_FILENAME = "results.csv"
DEFAULT_SUMMARY_FILENAME = "summary.json"

# ── Manifest ────────────────────────────────────────────────────────
DEFAULT_MANIFEST_SCHEMA_VERSION = 1

# ── Logging ─────────────────────────────────────────────────────────
DEFAULT_LOG_LEVEL = "WARNING"

# ── Experiment checks ───────────────────────────────────────────────
DEFAULT_CHECK_TOLERANCE = 0.05
DEFAULT_CHI_EXPONENT = -2.0  # finite-trace OTOC residual ~ chi^-2
DEFAULT_CHI_EXPONENT_TOLERANCE = 0.3
DEFAULT_REPORT_MAX_K = 6
DEFAULT_SUBLEADING_RTOL = 0.10  # measured chi^-2 coefficient vs prediction
