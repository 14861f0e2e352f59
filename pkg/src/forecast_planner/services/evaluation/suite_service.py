import csv
import json
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple

from injector import inject

from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.models.result_models import PlotData, SuiteRow
from forecast_planner.models.scenario_config import SuiteGridConfig
from forecast_planner.services.evaluation.method_runner import run_method
from forecast_planner.services.scenario_service import (
    cost_params_from_section,
    support_config_from_section,
)
from forecast_planner.utils.constants import (
    MAX_PARALLEL_WORKERS,
    RESULT_CSV_COLUMNS,
    Method,
    PlanStatus,
    TaskMode,
)
from forecast_planner.utils.evaluation.aggregation import (
    CellKey,
    CellSummary,
    aggregate_cells,
    plot_data,
)
from forecast_planner.utils.evaluation.methods import MethodSpec
from forecast_planner.utils.evaluation.scenario import generate_scenario
from forecast_planner.utils.graph_core import generate_random_graph
from forecast_planner.utils.log_handlers import CliLogger
from forecast_planner.utils.planner.joint_planner import CostParams
from forecast_planner.utils.seeding import derive_seed
from forecast_planner.utils.support.support_alloc import SupportConfig


@dataclass(frozen=True)
class SuiteJob:
    """One method on one grid scenario; picklable for worker processes."""

    method: MethodSpec
    task_mode: TaskMode
    graph_size: int
    ratio: float
    n_robots: int
    n_adversaries: int
    stay: float
    instance: int
    seed: int
    master_seed: int
    horizon_factor: int
    trials: int
    timeout_s: float
    params: CostParams
    support: SupportConfig
    record_timing: bool = True

    def graph_seed(self) -> int:
        return derive_seed(
            self.master_seed, "graph", self.graph_size, self.ratio, self.instance
        )

    def scenario_seed(self) -> int:
        # Stay is left out so every stay probability sees the same instances
        return derive_seed(
            self.master_seed,
            "scenario",
            self.graph_size,
            self.ratio,
            self.n_robots,
            self.n_adversaries,
            self.task_mode.value,
            self.instance,
            self.seed,
        )

    def key(self) -> tuple:
        return self.empty_row(PlanStatus.ERROR).key()

    def empty_row(self, status: PlanStatus) -> SuiteRow:
        return SuiteRow(
            method=self.method.label,
            graph_size=self.graph_size,
            ratio=self.ratio,
            n_robots=self.n_robots,
            n_adversaries=self.n_adversaries,
            stay=self.stay,
            instance=self.instance,
            seed=self.seed,
            status=status,
        )


def execute_job(job: SuiteJob) -> Tuple[SuiteRow, Optional[str]]:
    """Run one suite job; failures come back as an error row and message."""
    try:
        graph = generate_random_graph(job.graph_size, job.ratio, job.graph_seed())
        scenario = generate_scenario(
            graph,
            job.n_robots,
            job.n_adversaries,
            job.stay,
            job.task_mode,
            job.scenario_seed(),
            params=job.params,
            support=job.support,
            horizon=job.horizon_factor * job.graph_size,
        )
        result = run_method(scenario, job.method, job.timeout_s, job.trials).result
    except Exception as e:
        return job.empty_row(PlanStatus.ERROR), f"{type(e).__name__}: {e}"

    row = job.empty_row(result.status)
    row.j_exp = result.j_exp
    row.j_real_mean = result.j_real_mean
    row.j_real_se = result.j_real_se
    row.delta = result.delta
    row.runtime_ms = result.runtime_ms if job.record_timing else 0
    row.makespan = result.makespan
    return row, None


def expand_method_specs(grid: SuiteGridConfig) -> List[MethodSpec]:
    specs: List[MethodSpec] = []
    for method in grid.methods:
        if method == Method.FORECAST_AWARE:
            specs.extend(MethodSpec(method, variant) for variant in grid.variants)
        else:
            specs.append(MethodSpec(method))
    return specs


def expand_jobs(
    grid: SuiteGridConfig, task_mode: TaskMode, record_timing: bool = True
) -> List[SuiteJob]:
    """Every (cell, instance, seed, method) of the grid in a stable order."""
    params = cost_params_from_section(grid.params)
    support = support_config_from_section(grid.support)
    specs = expand_method_specs(grid)
    jobs = []
    for size in grid.sizes:
        for ratio in grid.ratios:
            for team in grid.configs:
                for stay in grid.stays:
                    for instance in range(grid.instances):
                        for seed in range(grid.seeds):
                            for spec in specs:
                                jobs.append(
                                    SuiteJob(
                                        method=spec,
                                        task_mode=task_mode,
                                        graph_size=size,
                                        ratio=float(ratio),
                                        n_robots=team.robots,
                                        n_adversaries=team.adversaries,
                                        stay=float(stay),
                                        instance=instance,
                                        seed=seed,
                                        master_seed=grid.master_seed,
                                        horizon_factor=grid.horizon_factor,
                                        trials=grid.trials,
                                        timeout_s=grid.timeout_s,
                                        params=params,
                                        support=support,
                                        record_timing=record_timing,
                                    )
                                )
    return jobs


def read_rows(path: Path) -> List[SuiteRow]:
    if not path.exists():
        return []
    with open(path, newline="") as f:
        return [SuiteRow.from_csv_row(row) for row in csv.DictReader(f)]


@dataclass
class SuiteOutcome:
    rows: List[SuiteRow]
    cells: Dict[CellKey, CellSummary]
    plot: PlotData
    executed: int
    skipped: int
    failures: List[str] = field(default_factory=list)


class SuiteService:
    """Runs experiment grids with a streamed, resumable results CSV."""

    @inject
    def __init__(self, logger: CliLogger, ui: ConsoleUI) -> None:
        self.logger = logger
        self.ui = ui

    def run_suite(
        self,
        grid: SuiteGridConfig,
        task_mode: TaskMode,
        csv_path: Path,
        plot_path: Optional[Path] = None,
        workers: int = 1,
        record_timing: bool = True,
    ) -> SuiteOutcome:
        jobs = expand_jobs(grid, task_mode, record_timing)
        done_keys = self._completed_keys(csv_path)
        pending = [job for job in jobs if job.key() not in done_keys]
        skipped = len(jobs) - len(pending)
        if skipped:
            self.logger.info(f"Resuming {csv_path}: skipping {skipped} finished runs")
        self.logger.info(
            f"Suite ({task_mode.value}): {len(pending)} runs to execute "
            f"with {workers} worker(s)"
        )

        failures: List[str] = []
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        write_header = not csv_path.exists() or csv_path.stat().st_size == 0
        with open(csv_path, "a", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=RESULT_CSV_COLUMNS)
            if write_header:
                writer.writeheader()
                f.flush()
            with self.ui.progress(f"Suite {task_mode.value}", len(pending)) as (
                progress,
                task,
            ):
                for job, row, error in self._execute(pending, workers):
                    if error is not None:
                        message = f"{job.method.label} {job.key()}: {error}"
                        self.logger.warning(f"Run failed, recorded as error: {message}")
                        failures.append(message)
                    writer.writerow(row.to_csv_row())
                    f.flush()
                    progress.advance(task)

        rows = read_rows(csv_path)
        wanted = {job.key() for job in jobs}
        rows = [row for row in rows if row.key() in wanted]
        cells = aggregate_cells(rows)
        plot = plot_data(cells)
        if plot_path is not None:
            plot_path.parent.mkdir(parents=True, exist_ok=True)
            document = plot.to_dict()  # type: ignore[attr-defined]
            plot_path.write_text(json.dumps(document, indent=2) + "\n")
            self.logger.info(f"Wrote plot data to {plot_path}")

        return SuiteOutcome(
            rows=rows,
            cells=cells,
            plot=plot,
            executed=len(pending),
            skipped=skipped,
            failures=failures,
        )

    def run_grid(
        self,
        grid: SuiteGridConfig,
        out: Path,
        plot_out: Optional[Path] = None,
        workers: int = 1,
        record_timing: bool = True,
    ) -> Dict[TaskMode, SuiteOutcome]:
        """Run every task mode of a grid.

        A single-mode grid writes ``out`` (and ``plot_out``); several modes
        treat ``out`` as a directory holding ``<mode>.csv`` and
        ``<mode>_plot.json`` per mode.
        """
        outcomes = {}
        for task_mode in grid.task_modes:
            if len(grid.task_modes) == 1:
                csv_path, plot_path = out, plot_out
            else:
                csv_path = out / f"{task_mode.value}.csv"
                plot_path = out / f"{task_mode.value}_plot.json"
            outcomes[task_mode] = self.run_suite(
                grid,
                task_mode,
                csv_path,
                plot_path=plot_path,
                workers=workers,
                record_timing=record_timing,
            )
        return outcomes

    def _completed_keys(self, csv_path: Path) -> Set[tuple]:
        return {row.key() for row in read_rows(csv_path)}

    def _execute(
        self, jobs: List[SuiteJob], workers: int
    ) -> Iterator[Tuple[SuiteJob, SuiteRow, Optional[str]]]:
        if not jobs:
            return
        workers = min(max(1, workers), MAX_PARALLEL_WORKERS, len(jobs))
        if workers == 1:
            for job in jobs:
                row, error = execute_job(job)
                yield job, row, error
            return

        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(execute_job, job): job for job in jobs}
            for future in as_completed(futures):
                job = futures[future]
                try:
                    row, error = future.result()
                except Exception as e:
                    row, error = job.empty_row(PlanStatus.ERROR), str(e)
                yield job, row, error

