# epspy - paths and experiment constants
import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment overrides (EPSPY_SEED, EPSPY_OUTPUT_DIR) from .env
load_dotenv()

# Repo root sits three levels above this file (src/epspy/config.py)
PROJECT_ROOT = Path(__file__).parent.parent.parent
SETTINGS_FILE = PROJECT_ROOT / "experiment_settings.yaml"
OUTPUT_DIR = Path(os.environ.get("EPSPY_OUTPUT_DIR", PROJECT_ROOT / "output"))

# Seeds are 64-bit unsigned integers
SEED_LIMIT = 2**64
DEFAULT_SEED = 20180817

# Grid shared by Tables 1-3
TABLE_ALPHA = 0.5
TABLE_THETAS = (0.0, 1.0, 10.0)
TABLE_EPSILONS = (0.10, 0.05, 0.01)
REPLICATIONS = 10_000

# Figure 1 panels: (panel, swept parameter, alpha, theta, epsilon values)
FIG1_PANELS = (
    ("left", "epsilon", {"alpha": (0.4,), "theta": (1.0,), "epsilon": (0.10, 0.05, 0.01)}),
    ("center", "alpha", {"alpha": (0.4, 0.5, 0.6), "theta": (1.0,), "epsilon": (0.10,)}),
    ("right", "theta", {"alpha": (0.25,), "theta": (0.0, 1.0, 10.0), "epsilon": (0.05,)}),
)

# Numerical safeguards
REJECTION_CAP = 1_000_000
STICK_CAP = 10_000_000
REFERENCE_TOLERANCE = 1e-8
REFERENCE_MAX_STICKS = 10_000
