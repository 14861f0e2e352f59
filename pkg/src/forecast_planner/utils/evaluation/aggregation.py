"""Per-cell statistics over suite rows."""

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from forecast_planner.models.result_models import (
    CalibrationCell,
    CalibrationReport,
    PlotData,
    PlotSeries,
    SuiteRow,
)
from forecast_planner.utils.constants import PlanStatus
from forecast_planner.utils.evaluation.monte_carlo import mean_and_se, pooled_se

CellKey = Tuple[str, int, float, int, int, float]


@dataclass(frozen=True)
class CellSummary:
    """Means over the solved runs of one (method, size, ratio, team, stay) cell."""

    runs: int
    solved: int
    j_exp_mean: Optional[float]
    j_exp_se: Optional[float]
    j_real_mean: Optional[float]
    runtime_ms_mean: float

    @property
    def failure_rate(self) -> float:
        return 0.0 if self.runs == 0 else (self.runs - self.solved) / self.runs


def cell_key(row: SuiteRow) -> CellKey:
    return (
        row.method,
        row.graph_size,
        float(row.ratio),
        row.n_robots,
        row.n_adversaries,
        float(row.stay),
    )


def aggregate_cells(rows: Iterable[SuiteRow]) -> Dict[CellKey, CellSummary]:
    """Group rows by cell; failed runs count only toward the failure rate."""
    grouped: Dict[CellKey, List[SuiteRow]] = defaultdict(list)
    for row in rows:
        grouped[cell_key(row)].append(row)

    cells = {}
    for key in sorted(grouped):
        members = grouped[key]
        solved = [r for r in members if r.status == PlanStatus.SOLVED]
        j_exp_mean = j_exp_se = j_real_mean = None
        if solved:
            j_exp_mean, j_exp_se = mean_and_se([r.j_exp for r in solved])
            j_real_mean, _ = mean_and_se([r.j_real_mean for r in solved])
        cells[key] = CellSummary(
            runs=len(members),
            solved=len(solved),
            j_exp_mean=j_exp_mean,
            j_exp_se=j_exp_se,
            j_real_mean=j_real_mean,
            runtime_ms_mean=float(np.mean([r.runtime_ms for r in members])),
        )
    return cells


def plot_data(cells: Dict[CellKey, CellSummary]) -> PlotData:
    """Series over stay probability per (method, size, ratio, team)."""
    by_series: Dict[Tuple, List[Tuple[float, CellSummary]]] = defaultdict(list)
    for (method, size, ratio, robots, adversaries, stay), summary in cells.items():
        by_series[(method, size, ratio, robots, adversaries)].append((stay, summary))

    series = []
    for (method, size, ratio, robots, adversaries), points in sorted(by_series.items()):
        points.sort(key=lambda item: item[0])
        series.append(
            PlotSeries(
                method=method,
                graph_size=size,
                ratio=ratio,
                n_robots=robots,
                n_adversaries=adversaries,
                x=[stay for stay, _ in points],
                y=[s.j_exp_mean for _, s in points],
                yerr=[s.j_exp_se for _, s in points],
                runtime_ms=[s.runtime_ms_mean for _, s in points],
                failure_rate=[s.failure_rate for _, s in points],
                runs=[s.runs for _, s in points],
            )
        )
    return PlotData(series=series)


def calibration_report(
    rows: Iterable[SuiteRow], method: str, bound: float, sigmas: float
) -> CalibrationReport:
    """Expected versus realized team cost per (robots, adversaries, stay) cell."""
    grouped: Dict[Tuple[int, int, float], List[SuiteRow]] = defaultdict(list)
    for row in rows:
        if row.method == method and row.status == PlanStatus.SOLVED:
            grouped[(row.n_robots, row.n_adversaries, float(row.stay))].append(row)

    cells = []
    for (robots, adversaries, stay), members in sorted(grouped.items()):
        j_exp, _ = mean_and_se([r.j_exp for r in members])
        j_real, _ = mean_and_se([r.j_real_mean for r in members])
        delta, _ = mean_and_se([r.delta for r in members])
        se = pooled_se([r.j_real_se for r in members])
        cells.append(
            CalibrationCell(
                n_robots=robots,
                n_adversaries=adversaries,
                stay=stay,
                runs=len(members),
                j_exp=j_exp,
                j_real_mean=j_real,
                delta=delta,
                pooled_se=se,
                exceeds_bound=abs(delta) > bound,
                exceeds_sigma_bound=abs(delta) > sigmas * se,
            )
        )
    return CalibrationReport(method=method, bound=bound, sigmas=sigmas, cells=cells)
