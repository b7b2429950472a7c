import os
from typing import Optional


# Possible values for env variables

ENV_VARS_TRUE_VALUES = {"1", "ON", "YES", "TRUE"}


def _is_true(value: Optional[str]) -> bool:
    if value is None:
        return False
    return value.upper() in ENV_VARS_TRUE_VALUES


# Image format

PGM_MAGIC = b"P5"
PGM_MAXVAL = 255

# Filters shared by embedding costs and residuals

KB_KERNEL = (
    (-1.0, 2.0, -1.0),
    (2.0, -4.0, 2.0),
    (-1.0, 2.0, -1.0),
)
HILL_LOWPASS_1_SIZE = 3
HILL_LOWPASS_2_SIZE = 15
HILL_MIN_SIZE = HILL_LOWPASS_2_SIZE

# Floors applied before inversion and on final costs
HILL_DENOMINATOR_FLOOR = 1e-10
COST_FLOOR = 1e-10

# Payload-limited sender
LAMBDA_MAX = 1e6
CALIBRATION_MAX_ITERATIONS = 200
CALIBRATION_TOLERANCE = 1e-3

# Embedding algorithms
ALGORITHM_LSBM = "LSBM"
ALGORITHM_HILL = "HILL"
ALGORITHMS = [ALGORITHM_LSBM, ALGORITHM_HILL]

# Synthetic sources
MIN_SYNTH_SIZE = 16

# Features
RESIDUAL_FIRST_ORDER = "FIRST_ORDER"
RESIDUAL_SECOND_ORDER = "SECOND_ORDER"
RESIDUAL_KB = "KB"
RESIDUAL_KINDS = [RESIDUAL_FIRST_ORDER, RESIDUAL_SECOND_ORDER, RESIDUAL_KB]
DIRECTION_HORIZONTAL = "HORIZONTAL"
DIRECTION_VERTICAL = "VERTICAL"
DIRECTIONS = [DIRECTION_HORIZONTAL, DIRECTION_VERTICAL]
MIN_FEATURE_SIZE = 16

# Ensemble
DEFAULT_N_LEARNERS = 51
DEFAULT_SUBSPACE_DIM = 200
SUBSPACE_SEARCH_GRID = (100, 200, 400)
REG_EPS_RELATIVE = 1e-6
MODEL_FORMAT_NAME = "stegcheck-ensemble"
MODEL_FORMAT_VERSION = "1.0"

# Labels of the A set and class names of the two detectors
LABEL_COVER = "COVER"
LABEL_STEGO = "STEGO"
LABEL_DOUBLE_STEGO = "DOUBLE_STEGO"
LABELS = [LABEL_COVER, LABEL_STEGO]
CLASS_C_A = "C_A"
CLASS_S_A = "S_A"
CLASS_S_B = "S_B"
CLASS_D_B = "D_B"

# File names written by the harness
COVER_FILENAME_TEMPLATE = "cover_{:06d}.pgm"
MANIFEST_NAME = "manifest.csv"
CHANGESTATS_NAME = "changestats.csv"
REPORT_NAME = "report.csv"
VERDICTS_NAME = "verdicts.csv"
MODELS_DIRNAME = "models"
F_A_MODEL_NAME = "f_A.model"
F_B_MODEL_NAME = "f_B.model"
DETECTOR_CONFIG_NAME = "detector.yaml"
CONFIG_ECHO_NAME = "config.yaml"
LOCK_NAME = ".lock"

REPORT_HEADER = [
    "n",
    "TP",
    "TN",
    "FP",
    "FN",
    "Err",
    "Err_pred",
    "INC",
    "INC_C",
    "INC_S",
    "Err_filt",
    "TP_filt",
    "TN_filt",
    "FP_filt",
    "FN_filt",
]
EXPERIMENT_PREFIX_HEADER = ["N", "ALGO", "DBs", "C/S", "CLF"]
VERDICT_HEADER = [
    "index",
    "name",
    "pred_A_of_a",
    "pred_B_of_b",
    "pred_B_of_a",
    "pred_A_of_b",
    "f1",
    "f2",
    "inconsistent",
    "label",
]
SINGLE_IMAGE_NOTE = "n=1: prediction informational only"

# Here, `True` will disable progress bars globally without possibility of enabling it
# programmatically. `False` will enable them without possibility of disabling them.
# If environment variable is not set (None), then the user is free to enable/disable
# them programmatically.
# TL;DR: env variable has priority over code
STEGCHECK_DISABLE_PROGRESS_BARS: Optional[bool] = os.environ.get(
    "STEGCHECK_DISABLE_PROGRESS_BARS"
)
if STEGCHECK_DISABLE_PROGRESS_BARS is not None:
    STEGCHECK_DISABLE_PROGRESS_BARS = _is_true(STEGCHECK_DISABLE_PROGRESS_BARS)
