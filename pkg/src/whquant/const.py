import math
from importlib.metadata import PackageNotFoundError, version

try:
    WHQUANT_VERSION = version("whquant")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    WHQUANT_VERSION = "0.0.0"

TWO_PI = 2 * math.pi
SQRT_TWO_PI = math.sqrt(TWO_PI)

DECAY_FLOOR = 1e-10
"""Edge values above this fraction of the max get a wraparound flag"""
NORMALIZATION_TOL = 1e-8
HERMITIAN_TOL = 1e-9
WEIGHTED_HERMITIAN_TOL = 1e-10
ASSUMPTION_TOL = 1e-9
SMOOTHNESS_RATIO = 1.5
"""Max allowed growth of second differences when the grid spacing is halved"""
PI_TOL = 1e-8

MIN_MOLLIFIER_POINTS = 4
"""Minimum number of grid cells per mollifier radius"""
CLIP_TOL = 1e-12

DEFICIENCY_WINDOWS = (5.0, 10.0, 20.0, 40.0)
GROWTH_THRESHOLD = math.log(1e6)
NORMALIZABLE_TOL = 1e-6
INTERVAL_MARGINS = (1e-3, 1e-6, 1e-9, 1e-12)
"""Fractions of the interval width trimmed from each end for interval deficiency windows"""

MASS_IN_SET = 0.5
NORM_TOL = 1e-10
SUPPORT_TOL = 1e-8

OUTPUT_ENV = "WHQUANT_OUTPUT_DIR"
