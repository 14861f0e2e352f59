from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
from injector import inject

from forecast_planner.core.command_base import CommandBase
from forecast_planner.core.decorators import command, option
from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.models.scenario_config import SuiteGridConfig
from forecast_planner.services.evaluation.suite_service import (
    SuiteOutcome,
    SuiteService,
)
from forecast_planner.services.scenario_service import (
    GRID_PRESETS,
    ScenarioService,
    override_grid,
)
from forecast_planner.utils.constants import Method, ScoringVariant, TaskMode
from forecast_planner.utils.evaluation.methods import MethodSpec
from forecast_planner.utils.log_handlers import CliLogger

SuiteOutcomes = Dict[TaskMode, SuiteOutcome]


def split_method_labels(
    labels: Tuple[str, ...],
) -> Tuple[List[Method], List[ScoringVariant]]:
    """Methods named on the command line, plus variants spelled out for them."""
    methods = []
    variants = []
    for text in labels:
        spec = MethodSpec.parse(text)
        methods.append(spec.method)
        if ":" in text and spec.variant is not None:
            variants.append(spec.variant)
    return methods, variants


def summarize(ui: ConsoleUI, title: str, outcomes: SuiteOutcomes) -> None:
    """Per-method totals over every cell of every task mode."""
    for task_mode, outcome in outcomes.items():
        totals: Dict[str, List[Any]] = defaultdict(list)
        for (method, *_), cell in outcome.cells.items():
            totals[method].append(cell)
        rows = []
        for method, cells in sorted(totals.items()):
            runs = sum(c.runs for c in cells)
            solved = sum(c.solved for c in cells)
            means = [c.j_exp_mean for c in cells if c.j_exp_mean is not None]
            rows.append(
                [
                    method,
                    runs,
                    solved,
                    f"{sum(means) / len(means):.3f}" if means else None,
                    f"{(runs - solved) / runs:.2%}" if runs else None,
                ]
            )
        ui.display_table(
            f"{title} ({task_mode.value}): {outcome.executed} run, "
            f"{outcome.skipped} resumed",
            ["method", "runs", "solved", "mean cell j_exp", "failure rate"],
            rows,
        )
        for failure in outcome.failures:
            ui.display_warning(failure)


class GridCommand(CommandBase):
    """Shared grid loading for the suite-style commands."""

    default_preset: Optional[str] = None

    @inject
    def __init__(
        self,
        scenario_service: ScenarioService,
        suite_service: SuiteService,
        ui: ConsoleUI,
        logger: CliLogger,
    ) -> None:
        self.scenario_service = scenario_service
        self.suite_service = suite_service
        self.ui = ui
        self.logger = logger

    def load_grid(
        self,
        config: Optional[Path],
        preset: Optional[str],
        seed: Optional[int],
        timeout_s: Optional[float],
        trials: Optional[int],
        method_labels: Tuple[str, ...] = (),
        variants: Tuple[str, ...] = (),
    ) -> SuiteGridConfig:
        if config is None and preset is None:
            preset = self.default_preset
        grid = self.scenario_service.load_grid(config, preset)
        methods, method_variants = split_method_labels(method_labels)
        chosen_variants = [ScoringVariant(v) for v in variants] + method_variants
        return override_grid(
            grid,
            master_seed=seed,
            timeout_s=timeout_s,
            trials=trials,
            methods=methods,
            variants=chosen_variants,
        )

    def execute(self, **kwargs: Any) -> Any:
        raise NotImplementedError


@command("suite")
class Suite(GridCommand):
    """Run an experiment grid and stream results to a resumable CSV.

    A grid with several task modes treats --out as a directory holding
    <mode>.csv and <mode>_plot.json.

    Examples:

    \b
        fcplan suite --preset desk --out results/desk.csv --workers 4
        fcplan suite --config grid.yaml --out grid.csv --plot-out grid_plot.json
        fcplan suite --preset desk --method no_support --method forecast_aware
    """

    @option(
        "--config",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Grid config file (JSON or YAML)",
    )
    @option("--preset", type=click.Choice(GRID_PRESETS), help="Packaged grid preset")
    @option(
        "--out",
        required=True,
        type=click.Path(path_type=Path),
        help="Results CSV (a directory for multi-mode grids)",
    )
    @option("--plot-out", type=click.Path(dir_okay=False, path_type=Path))
    @option("--workers", "-w", type=int, default=1, show_default=True)
    @option("--seed", type=int, help="Master seed override")
    @option("--timeout-s", type=float, help="Per-run planning budget override")
    @option("--trials", type=int, help="Monte Carlo trials override")
    @option("--method", "-m", "methods", multiple=True, help="Restrict methods")
    @option(
        "--variant",
        "variants",
        multiple=True,
        type=click.Choice([v.value for v in ScoringVariant]),
        help="Scoring variants for forecast_aware",
    )
    @option("--no-timing", is_flag=True, help="Write runtime_ms as 0")
    def execute(
        self,
        out: Path,
        config: Optional[Path] = None,
        preset: Optional[str] = None,
        plot_out: Optional[Path] = None,
        workers: int = 1,
        seed: Optional[int] = None,
        timeout_s: Optional[float] = None,
        trials: Optional[int] = None,
        methods: Tuple[str, ...] = (),
        variants: Tuple[str, ...] = (),
        no_timing: bool = False,
        **kwargs: Any,
    ) -> SuiteOutcomes:
        """Run every cell of the grid."""
        if config is not None and preset is not None:
            raise click.UsageError("Use either --config or --preset, not both")
        if config is None and preset is None:
            raise click.UsageError("Give a grid with --config or --preset")
        grid = self.load_grid(
            config, preset, seed, timeout_s, trials, methods, variants
        )
        return self.suite_service.run_grid(
            grid,
            out,
            plot_out=plot_out,
            workers=workers,
            record_timing=not no_timing,
        )

    def output(self, result: SuiteOutcomes) -> None:
        summarize(self.ui, "Suite", result)
