"""
Constants and default values for the splitting-solver package.
"""

# Stopping rule and iteration limits
DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_ITERATIONS = 5000
DIVERGENCE_THRESHOLD = 1e8

# Inner SPD solves
DEFAULT_CG_TOLERANCE = 1e-12
CG_ITERATIONS_PER_UNKNOWN = 10
ORDERINGS = ("natural", "rcm", "mmd")

# Symmetry check: |a_ij - a_ji| <= SYMMETRY_RTOL * max(1, |a_ij|)
SYMMETRY_RTOL = 1e-12

# Dense oracles (generalized eigenproblem, iteration matrices)
ORACLE_CAP = 400
BRACKET_MAX_K = 64

# Eigenvalues within this distance of 1 belong to the lower block
UNIT_TOLERANCE = 1e-12

# Benchmark problems
EXAMPLE_IDS = ("1", "2", "3", "4", "synthetic")
EXAMPLE2_OMEGA = 4.0
EXAMPLE2_DAMPING = 0.02
EXAMPLE4_THETA1 = 1.5
EXAMPLE4_THETA2 = 0.2

# CLI and tables
DEFAULT_SIZE_CAP = 256
DEFAULT_GRID = (0.01, 2.0, 0.01)
DEFAULT_MAX_WORKERS = 4
FAILED_CELL = "†"
OUTPUT_FORMATS = ("markdown", "csv", "json")
REPORT_KEYS = ("example", "method", "alpha", "n", "iterations", "converged", "final_relres", "seconds")
TIMING_NOTE = "Wall-clock seconds on this machine; not comparable across hardware."

# Cache settings
DEFAULT_CACHE_AGE_HOURS = 24 * 30
