from pathlib import Path
from typing import Any, Optional

import click
from injector import inject

from forecast_planner.core.command_base import CommandBase
from forecast_planner.core.decorators import command, option
from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.services.evaluation.calibration_service import (
    CalibrationOutcome,
    CalibrationService,
)
from forecast_planner.services.scenario_service import (
    GRID_PRESETS,
    ScenarioService,
    override_grid,
)
from forecast_planner.utils.log_handlers import CliLogger


@command("calibrate")
class Calibrate(CommandBase):
    """Compare expected and Monte Carlo realized cost of forecast-aware plans.

    A cell passes when |j_real_mean - j_exp| <= max(bound, sigmas * se).

    Examples:

    \b
        fcplan calibrate --out calib.csv --report-out calib.json
        fcplan calibrate --config grid.yaml --out calib.csv --trials 1000
    """

    @inject
    def __init__(
        self,
        scenario_service: ScenarioService,
        calibration_service: CalibrationService,
        ui: ConsoleUI,
        logger: CliLogger,
    ) -> None:
        self.scenario_service = scenario_service
        self.calibration_service = calibration_service
        self.ui = ui
        self.logger = logger

    @option(
        "--config",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Grid config file (default: the calibration preset)",
    )
    @option("--preset", type=click.Choice(GRID_PRESETS), help="Packaged grid preset")
    @option(
        "--out",
        required=True,
        type=click.Path(dir_okay=False, path_type=Path),
        help="Results CSV",
    )
    @option("--report-out", type=click.Path(dir_okay=False, path_type=Path))
    @option("--workers", "-w", type=int, default=1, show_default=True)
    @option("--seed", type=int, help="Master seed override")
    @option("--timeout-s", type=float, help="Per-run planning budget override")
    @option("--trials", type=int, help="Monte Carlo trials override")
    @option("--no-timing", is_flag=True, help="Write runtime_ms as 0")
    def execute(
        self,
        out: Path,
        config: Optional[Path] = None,
        preset: Optional[str] = None,
        report_out: Optional[Path] = None,
        workers: int = 1,
        seed: Optional[int] = None,
        timeout_s: Optional[float] = None,
        trials: Optional[int] = None,
        no_timing: bool = False,
        **kwargs: Any,
    ) -> CalibrationOutcome:
        """Run the calibration grid and build the report."""
        if config is not None and preset is not None:
            raise click.UsageError("Use either --config or --preset, not both")
        if config is None and preset is None:
            preset = "calibration"
        grid = override_grid(
            self.scenario_service.load_grid(config, preset),
            master_seed=seed,
            timeout_s=timeout_s,
            trials=trials,
        )
        return self.calibration_service.calibrate(
            grid,
            out,
            report_path=report_out,
            workers=workers,
            record_timing=not no_timing,
        )

    def output(self, result: CalibrationOutcome) -> None:
        report = result.report
        rows = [
            [
                f"{cell.n_robots}x{cell.n_adversaries}",
                cell.stay,
                cell.runs,
                f"{cell.j_exp:.3f}",
                f"{cell.j_real_mean:.3f}",
                f"{cell.delta:+.3f}",
                f"{cell.pooled_se:.3f}",
                "no" if cell.exceeds_bound and cell.exceeds_sigma_bound else "yes",
            ]
            for cell in report.cells
        ]
        self.ui.display_table(
            f"Calibration of {report.method}",
            ["team", "stay", "runs", "j_exp", "j_real", "delta", "se", "within"],
            rows,
        )
        if report.within_bounds:
            self.ui.display_info("Every cell is within the deviation bound")
        else:
            self.ui.display_warning(
                f"Some cells exceed max({report.bound}, {report.sigmas} se)"
            )
