from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click

from forecast_planner.commands.suite.command import (
    GridCommand,
    SuiteOutcomes,
    summarize,
)
from forecast_planner.core.decorators import command, option
from forecast_planner.services.evaluation.suite_service import SuiteOutcome
from forecast_planner.services.scenario_service import GRID_PRESETS
from forecast_planner.utils.constants import Method, ScoringVariant


@command("ablate")
class Ablate(GridCommand):
    """Compare support scoring variants of the forecast-aware allocator.

    Writes <mode>.csv and <mode>_plot.json into the --out directory for
    every task mode of the grid. Defaults to the packaged ablation grid.

    Examples:

    \b
        fcplan ablate --out results/ablation
        fcplan ablate --config grid.yaml --variant risk_only --variant path_only
    """

    default_preset = "ablation"

    @option(
        "--config",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Grid config file (JSON or YAML)",
    )
    @option("--preset", type=click.Choice(GRID_PRESETS), help="Packaged grid preset")
    @option(
        "--out",
        required=True,
        type=click.Path(file_okay=False, path_type=Path),
        help="Output directory",
    )
    @option("--workers", "-w", type=int, default=1, show_default=True)
    @option("--seed", type=int, help="Master seed override")
    @option("--timeout-s", type=float, help="Per-run planning budget override")
    @option("--trials", type=int, help="Monte Carlo trials override")
    @option(
        "--variant",
        "variants",
        multiple=True,
        type=click.Choice([v.value for v in ScoringVariant]),
        help="Scoring variants to compare (default: the grid's)",
    )
    @option("--no-timing", is_flag=True, help="Write runtime_ms as 0")
    def execute(
        self,
        out: Path,
        config: Optional[Path] = None,
        preset: Optional[str] = None,
        workers: int = 1,
        seed: Optional[int] = None,
        timeout_s: Optional[float] = None,
        trials: Optional[int] = None,
        variants: Tuple[str, ...] = (),
        no_timing: bool = False,
        **kwargs: Any,
    ) -> SuiteOutcomes:
        """Run the forecast-aware method once per scoring variant."""
        if config is not None and preset is not None:
            raise click.UsageError("Use either --config or --preset, not both")
        grid = self.load_grid(
            config,
            preset,
            seed,
            timeout_s,
            trials,
            method_labels=(Method.FORECAST_AWARE.value,),
            variants=variants,
        )
        outcomes: Dict[Any, SuiteOutcome] = {}
        for task_mode in grid.task_modes:
            outcomes[task_mode] = self.suite_service.run_suite(
                grid,
                task_mode,
                out / f"{task_mode.value}.csv",
                plot_path=out / f"{task_mode.value}_plot.json",
                workers=workers,
                record_timing=not no_timing,
            )
        return outcomes

    def output(self, result: SuiteOutcomes) -> None:
        summarize(self.ui, "Ablation", result)
