from enum import Enum, IntEnum
from importlib.metadata import PackageNotFoundError, version

# Version constants
SCHEMA_VERSION = "1"

try:
    CLI_VERSION = version("fcplan")
except PackageNotFoundError:
    CLI_VERSION = "0.0.0+local"

# Cost model defaults
DEFAULT_BASE_COST = 1.0
DEFAULT_PENALTY = 10.0
DEFAULT_WAIT_COST = 0.1
DEFAULT_SUPPORT_COST = 0.1

# Support allocation defaults
DEFAULT_HOP_RADIUS = 2
DEFAULT_SUPPORTS_PER_EDGE = 1
DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 1.0
RISK_EPSILON = 1e-9

# Planning and evaluation defaults
DEFAULT_HORIZON_FACTOR = 2
DEFAULT_TIMEOUT_S = 90.0
DEFAULT_MC_TRIALS = 500
DEFAULT_CALIBRATION_BOUND = 1.0
DEFAULT_CALIBRATION_SIGMAS = 4.0

# Oracle guards
MAX_ENUMERATED_PATHS = 10**6
MAX_EXHAUSTIVE_STATES = 10**7

# Concurrency constants for suite sweeps
MAX_PARALLEL_WORKERS = 8

PRESETS_PACKAGE = "forecast_planner.presets"


class ExitCode(IntEnum):
    """Stable process exit codes."""

    OK = 0
    USAGE_ERROR = 1
    INFEASIBLE = 2
    TIMEOUT = 3


class PlanStatus(str, Enum):
    SOLVED = "solved"
    INFEASIBLE = "infeasible"
    TIMEOUT = "timeout"
    ERROR = "error"


class ActionType(str, Enum):
    WAIT = "wait"
    MOVE = "move"
    SUPPORT = "support"
    DONE = "done"


class TaskMode(str, Enum):
    """Start/goal assignment modes."""

    DSDG = "dsdg"  # different start, different goal
    SSSG = "sssg"  # same start, same goal


class ScoringVariant(str, Enum):
    """Node scoring strategies for support allocation."""

    RISK_PATH = "risk_path"
    RISK_ONLY = "risk_only"
    PATH_ONLY = "path_only"
    DETOUR_ONLY = "detour_only"


class Method(str, Enum):
    """Planning methods compared in experiments."""

    NO_RISK = "no_risk"
    NO_SUPPORT = "no_support"
    RANDOM = "random"
    TCGRE = "tcgre"
    FORECAST_AWARE = "forecast_aware"


class Allocator(str, Enum):
    """Support allocator named in a scenario file."""

    FORECAST_AWARE = "forecast_aware"
    RANDOM = "random"
    TCGRE = "tcgre"
    NONE = "none"


ALLOCATOR_METHODS = {
    Allocator.FORECAST_AWARE: Method.FORECAST_AWARE,
    Allocator.RANDOM: Method.RANDOM,
    Allocator.TCGRE: Method.TCGRE,
    Allocator.NONE: Method.NO_SUPPORT,
}

STATUS_EXIT_CODES = {
    PlanStatus.SOLVED: ExitCode.OK,
    PlanStatus.INFEASIBLE: ExitCode.INFEASIBLE,
    PlanStatus.TIMEOUT: ExitCode.TIMEOUT,
    PlanStatus.ERROR: ExitCode.USAGE_ERROR,
}

RESULT_CSV_COLUMNS = [
    "method",
    "graph_size",
    "ratio",
    "n_robots",
    "n_adversaries",
    "stay",
    "instance",
    "seed",
    "status",
    "j_exp",
    "j_real_mean",
    "j_real_se",
    "delta",
    "runtime_ms",
    "makespan",
]

# Columns identifying a run; resumed suites skip rows already keyed here
COORDINATE_COLUMNS = RESULT_CSV_COLUMNS[:8]
