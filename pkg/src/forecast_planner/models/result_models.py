from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from dataclasses_json import Undefined, dataclass_json

from forecast_planner.utils.constants import (
    CLI_VERSION,
    RESULT_CSV_COLUMNS,
    SCHEMA_VERSION,
    PlanStatus,
)


@dataclass_json
@dataclass
class RunResult:
    """Outcome of one method on one scenario.

    Monte Carlo fields are set only for solved runs.
    """

    method: str
    status: PlanStatus
    j_exp: Optional[float] = None
    j_real_mean: Optional[float] = None
    j_real_se: Optional[float] = None
    delta: Optional[float] = None
    runtime_ms: int = 0
    makespan: Optional[int] = None
    supports: int = 0
    expansions: int = 0
    error: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.status == PlanStatus.SOLVED


@dataclass_json
@dataclass
class SuiteRow:
    """One results CSV row: grid coordinates plus the run outcome."""

    method: str
    graph_size: int
    ratio: float
    n_robots: int
    n_adversaries: int
    stay: float
    instance: int
    seed: int
    status: PlanStatus
    j_exp: Optional[float] = None
    j_real_mean: Optional[float] = None
    j_real_se: Optional[float] = None
    delta: Optional[float] = None
    runtime_ms: int = 0
    makespan: Optional[int] = None

    def key(self) -> tuple:
        return (
            self.method,
            str(self.graph_size),
            repr(float(self.ratio)),
            str(self.n_robots),
            str(self.n_adversaries),
            repr(float(self.stay)),
            str(self.instance),
            str(self.seed),
        )

    def to_csv_row(self) -> Dict[str, str]:
        values = self.to_dict(encode_json=True)  # type: ignore[attr-defined]
        values["ratio"] = float(self.ratio)
        values["stay"] = float(self.stay)
        return {
            column: "" if values[column] is None else str(values[column])
            for column in RESULT_CSV_COLUMNS
        }

    @classmethod
    def from_csv_row(cls, row: Dict[str, str]) -> "SuiteRow":
        def optional(name: str, kind: Any) -> Any:
            text = row.get(name, "")
            return kind(text) if text != "" else None

        return cls(
            method=row["method"],
            graph_size=int(row["graph_size"]),
            ratio=float(row["ratio"]),
            n_robots=int(row["n_robots"]),
            n_adversaries=int(row["n_adversaries"]),
            stay=float(row["stay"]),
            instance=int(row["instance"]),
            seed=int(row["seed"]),
            status=PlanStatus(row["status"]),
            j_exp=optional("j_exp", float),
            j_real_mean=optional("j_real_mean", float),
            j_real_se=optional("j_real_se", float),
            delta=optional("delta", float),
            runtime_ms=int(row.get("runtime_ms") or 0),
            makespan=optional("makespan", int),
        )


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class SupportAssignmentDocument:
    edge: List[int]
    nodes: List[int]
    scores: List[float] = field(default_factory=list)


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class SupportActivationDocument:
    edge: List[int]
    t: int


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class SupportEventDocument:
    robot: int
    node: int
    edge: List[int]
    t: int


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class RobotPlanDocument:
    actions: List[Dict[str, Any]] = field(default_factory=list)


@dataclass_json(undefined=Undefined.RAISE)
@dataclass
class PlanDocument:
    """Plan JSON; action entries are ``{"type": ...}`` objects."""

    status: PlanStatus
    j_exp: Optional[float] = None
    makespan: Optional[int] = None
    robots: List[RobotPlanDocument] = field(default_factory=list)
    supports: List[SupportActivationDocument] = field(default_factory=list)
    method: Optional[str] = None
    support_map: List[SupportAssignmentDocument] = field(default_factory=list)
    paths: List[List[int]] = field(default_factory=list)
    support_events: List[SupportEventDocument] = field(default_factory=list)


@dataclass_json
@dataclass
class RunReport:
    """Result JSON written by ``run``."""

    scenario: str
    results: List[RunResult]
    schema_version: str = SCHEMA_VERSION
    cli_version: str = CLI_VERSION


@dataclass_json
@dataclass
class PlotSeries:
    method: str
    graph_size: int
    ratio: float
    n_robots: int
    n_adversaries: int
    x: List[float]
    y: List[Optional[float]]
    yerr: List[Optional[float]]
    runtime_ms: List[Optional[float]]
    failure_rate: List[float]
    runs: List[int]


@dataclass_json
@dataclass
class PlotData:
    series: List[PlotSeries]
    schema_version: str = SCHEMA_VERSION


@dataclass_json
@dataclass
class CalibrationCell:
    n_robots: int
    n_adversaries: int
    stay: float
    runs: int
    j_exp: float
    j_real_mean: float
    delta: float
    pooled_se: float
    exceeds_bound: bool
    exceeds_sigma_bound: bool


@dataclass_json
@dataclass
class CalibrationReport:
    method: str
    bound: float
    sigmas: float
    cells: List[CalibrationCell]
    schema_version: str = SCHEMA_VERSION

    @property
    def within_bounds(self) -> bool:
        """Each cell passes max(bound, sigmas * se)."""
        return all(
            not (cell.exceeds_bound and cell.exceeds_sigma_bound) for cell in self.cells
        )
