"""
Configuration for the legendrian package.

Every tunable is read once from the environment (a local .env file is
honoured) and cast to its type. Library functions use these values as
keyword defaults; the command line overrides them per run.
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Sampling
DEFAULT_SAMPLES = int(os.getenv("LEGENDRIAN_SAMPLES", "2048"))
FRENET_SUBSTEPS = int(os.getenv("LEGENDRIAN_FRENET_SUBSTEPS", "4"))

# Rational detection and integrality
RATIONAL_MAX_DENOMINATOR = int(os.getenv("LEGENDRIAN_RATIONAL_MAX_DENOMINATOR", "64"))
RATIONAL_TOLERANCE = float(os.getenv("LEGENDRIAN_RATIONAL_TOL", "1e-9"))
CLOSURE_TOLERANCE = float(os.getenv("LEGENDRIAN_CLOSURE_TOL", "1e-4"))  # six-digit moduli
MASLOV_TOLERANCE = float(os.getenv("LEGENDRIAN_MASLOV_TOL", "1e-4"))
PERIOD_TOLERANCE = float(os.getenv("LEGENDRIAN_PERIOD_TOL", "1e-6"))

# Geometry
POLE_DISTANCE = float(os.getenv("LEGENDRIAN_POLE_DISTANCE", "1e-6"))
TANGENCY_ANGLE = float(os.getenv("LEGENDRIAN_TANGENCY_ANGLE", "1e-3"))

# Stationary curves
WAVE_NUMBER_BOUND = int(os.getenv("LEGENDRIAN_WAVE_NUMBER_BOUND", "128"))
MONODROMY_TOLERANCE = float(os.getenv("LEGENDRIAN_MONODROMY_TOL", "1e-6"))
EXCEPTIONAL_TOLERANCE = float(os.getenv("LEGENDRIAN_EXCEPTIONAL_TOL", "1e-5"))
MOMENTUM_TOLERANCE = float(os.getenv("LEGENDRIAN_MOMENTUM_TOL", "1e-7"))
ENERGY_DRIFT_TOLERANCE = float(os.getenv("LEGENDRIAN_ENERGY_DRIFT_TOL", "1e-9"))

# Flows
FLOW_CFL = float(os.getenv("LEGENDRIAN_FLOW_CFL", "0.05"))
BLOWUP_FACTOR = float(os.getenv("LEGENDRIAN_BLOWUP_FACTOR", "1e3"))
COMPATIBILITY_TOLERANCE = float(os.getenv("LEGENDRIAN_COMPATIBILITY_TOL", "1e-6"))
HIERARCHY_MAX_LEVEL = int(os.getenv("LEGENDRIAN_HIERARCHY_MAX_LEVEL", "8"))

# Modular curve continuation
SCAN_INITIAL_STEP = float(os.getenv("LEGENDRIAN_SCAN_STEP", "1e-2"))
SCAN_MAX_STEP = float(os.getenv("LEGENDRIAN_SCAN_MAX_STEP", "0.05"))
SCAN_E1_MIN = float(os.getenv("LEGENDRIAN_SCAN_E1_MIN", "1e-3"))
SCAN_RADIUS_MAX = float(os.getenv("LEGENDRIAN_SCAN_RADIUS_MAX", "60"))
SCAN_NEWTON_TOLERANCE = float(os.getenv("LEGENDRIAN_SCAN_NEWTON_TOL", "1e-10"))
SCAN_MAX_FAILURES = int(os.getenv("LEGENDRIAN_SCAN_MAX_FAILURES", "5"))

# Runtime
WORKER_THREADS = int(os.getenv("LEGENDRIAN_WORKERS", "4"))
LOG_LEVEL = os.getenv("LEGENDRIAN_LOG_LEVEL", "INFO")
