from dataclasses import dataclass, field
from typing import Any, List, Optional

from dataclasses_json import Undefined, config, dataclass_json

from forecast_planner.utils.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BASE_COST,
    DEFAULT_BETA,
    DEFAULT_CALIBRATION_BOUND,
    DEFAULT_CALIBRATION_SIGMAS,
    DEFAULT_HOP_RADIUS,
    DEFAULT_HORIZON_FACTOR,
    DEFAULT_MC_TRIALS,
    DEFAULT_PENALTY,
    DEFAULT_SUPPORT_COST,
    DEFAULT_SUPPORTS_PER_EDGE,
    DEFAULT_TIMEOUT_S,
    DEFAULT_WAIT_COST,
    Allocator,
    Method,
    ScoringVariant,
    TaskMode,
)


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class AdversarySection:
    count: int
    stay: float
    initial_edges: List[List[int]] = field(default_factory=list)


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class TaskSection:
    start: int
    goal: int


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class CostSection:
    r_a: float = DEFAULT_BASE_COST
    r_p: float = DEFAULT_PENALTY
    wait: float = DEFAULT_WAIT_COST
    support: float = DEFAULT_SUPPORT_COST


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class SupportSection:
    k: int = DEFAULT_HOP_RADIUS
    s: int = DEFAULT_SUPPORTS_PER_EDGE
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    variant: ScoringVariant = ScoringVariant.RISK_PATH
    allocator: Allocator = Allocator.FORECAST_AWARE
    coverage_radius: Optional[int] = None


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class ScenarioFile:
    """Scenario document; ``graph`` is an inline graph object or a file path."""

    graph: Any
    adversaries: AdversarySection
    tasks: List[TaskSection]
    task_mode: TaskMode = TaskMode.DSDG
    params: CostSection = field(default_factory=CostSection)
    support: SupportSection = field(default_factory=SupportSection)
    horizon: Optional[int] = field(default=None, metadata=config(field_name="T"))
    seed: int = 0


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class TeamConfig:
    """One robots x adversaries configuration of a suite grid."""

    robots: int
    adversaries: int


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class SuiteGridConfig:
    """Experiment grid for suite, ablation and calibration runs."""

    sizes: List[int]
    ratios: List[float]
    configs: List[TeamConfig]
    stays: List[float]
    instances: int = 4
    seeds: int = 5
    methods: List[Method] = field(
        default_factory=lambda: [
            Method.NO_RISK,
            Method.NO_SUPPORT,
            Method.RANDOM,
            Method.TCGRE,
            Method.FORECAST_AWARE,
        ]
    )
    variants: List[ScoringVariant] = field(
        default_factory=lambda: [ScoringVariant.RISK_PATH]
    )
    task_modes: List[TaskMode] = field(default_factory=lambda: [TaskMode.DSDG])
    horizon_factor: int = DEFAULT_HORIZON_FACTOR
    trials: int = DEFAULT_MC_TRIALS
    timeout_s: float = DEFAULT_TIMEOUT_S
    master_seed: int = 0
    params: CostSection = field(default_factory=CostSection)
    support: SupportSection = field(default_factory=SupportSection)
    calibration_bound: float = DEFAULT_CALIBRATION_BOUND
    calibration_sigmas: float = DEFAULT_CALIBRATION_SIGMAS
