import os
from dotenv import load_dotenv

load_dotenv()

VERSION = "0.1.0"

# Worker threads for grid sweeps; results never depend on this value
WORKERS = max(1, int(os.getenv("FLUXMECH_WORKERS", "1")))
LOG_LEVEL = os.getenv("FLUXMECH_LOG_LEVEL", "INFO")
OUTPUT_DIR = os.getenv("FLUXMECH_OUTPUT_DIR", "outputs")

# Integrator defaults
DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
SAMPLES_PER_PERIOD = 32

# CSV float formatting: 17 significant digits round-trips IEEE doubles
FLOAT_FORMAT = "%.17g"
