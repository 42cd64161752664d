"""Configuration and numerical defaults for the project.

Every tolerance and budget used by the library lives here so that the CLI,
the sweep workers and the tests agree on one set of values. Environment
variables (optionally from a `.env` file) only choose where artifacts go
and which sweep backend runs.
"""
import os

try:
    from dotenv import load_dotenv

    load_dotenv()
except Exception:
    # python-dotenv is optional at runtime; plain environment variables still work
    pass

# Quadrature (Keller-Osserman integrals and estimate integrals)
KO_TOL = 1e-8
KO_CANONICAL_BETA = 1.0
KO_TAIL_MARGIN = 1e-3
KO_TAIL_GROWTH = 4.0
KO_TAIL_CAP = 1e12
KO_TAIL_SAMPLE_MAX = 1e8
KO_SUBINTERVAL_BUDGET = 2 ** 20
QUAD_PIECE_LIMIT = 200
QUAD_REL_TOL = 1e-11

# Radial initial-value problem
IVP_ABS_TOL = 1e-10
IVP_REL_TOL = 1e-10
IVP_MAX_STEPS = 10_000_000
IVP_SERIES_START = 1e-6
IVP_MAX_STEP_FRACTION = 0.02
BLOWUP_THRESHOLD = 1e12
DIVERGENCE_SWITCH = 1e4
SLOPE_CLAMP = 1e-14
ORIGIN_FRACTION = 1e-8
DEFAULT_RMAX = 1e3

# Blow-up brackets and bisection searches
BRACKET_TOL = 1e-4
BRACKET_REFINEMENTS = 3
RADIUS_SEARCH_ITERATIONS = 200

# Estimates
ESTIMATE_REL_SLACK = 1e-8

# Admissibility strictness: sigma_j > ADMISSIBILITY_TOL * max(1, |lambda|^j)
ADMISSIBILITY_TOL = 1e-14

# Dirichlet problems
SHOOTING_LOWER_FRACTION = 1e-6
SHOOTING_TOL = 1e-8
MONOTONE_TOL = 1e-11
MONOTONE_MAX_ITERATIONS = 500
MONOTONE_MIN_GRID = 64
COMPARISON_SLACK = 1e-10

# Artifacts, cache and sweep backend
OUTPUT_DIR = os.environ.get("KHESSIAN_OUTPUT_DIR", os.path.join(os.getcwd(), "khessian-output"))
CACHE_DIR = os.environ.get("KHESSIAN_CACHE_DIR", os.path.join(os.path.dirname(__file__), "..", ".cache"))
LOG_LEVEL = os.environ.get("KHESSIAN_LOG_LEVEL", "INFO")
SWEEP_BACKEND = os.environ.get("KHESSIAN_SWEEP_BACKEND", "auto")
REDIS_URL = os.environ.get("REDIS_URL", "redis://localhost:6379/0")
SWEEP_QUEUE = "khessian-sweep"
FIXTURES_PATH = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "fixtures.json")
