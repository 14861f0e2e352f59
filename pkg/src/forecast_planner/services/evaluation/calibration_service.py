import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from injector import inject

from forecast_planner.models.result_models import CalibrationReport
from forecast_planner.models.scenario_config import SuiteGridConfig
from forecast_planner.services.evaluation.suite_service import (
    SuiteOutcome,
    SuiteService,
)
from forecast_planner.utils.constants import Method
from forecast_planner.utils.evaluation.aggregation import calibration_report
from forecast_planner.utils.evaluation.methods import MethodSpec
from forecast_planner.utils.log_handlers import CliLogger


@dataclass
class CalibrationOutcome:
    suite: SuiteOutcome
    report: CalibrationReport


class CalibrationService:
    """Checks forecast-aware expected costs against Monte Carlo realized costs."""

    @inject
    def __init__(self, logger: CliLogger, suite_service: SuiteService) -> None:
        self.logger = logger
        self.suite_service = suite_service

    def calibrate(
        self,
        grid: SuiteGridConfig,
        csv_path: Path,
        report_path: Optional[Path] = None,
        workers: int = 1,
        record_timing: bool = True,
    ) -> CalibrationOutcome:
        # Only the first variant and task mode are calibrated
        variant = grid.variants[0]
        grid = replace(
            grid,
            methods=[Method.FORECAST_AWARE],
            variants=[variant],
            task_modes=grid.task_modes[:1],
        )
        suite = self.suite_service.run_suite(
            grid,
            grid.task_modes[0],
            csv_path,
            workers=workers,
            record_timing=record_timing,
        )
        label = MethodSpec(Method.FORECAST_AWARE, variant).label
        report = calibration_report(
            suite.rows, label, grid.calibration_bound, grid.calibration_sigmas
        )
        for cell in report.cells:
            self.logger.info(
                f"Calibration {cell.n_robots}x{cell.n_adversaries} stay={cell.stay}: "
                f"delta={cell.delta:+.4f} pooled se={cell.pooled_se:.4f}"
            )
        if not report.within_bounds:
            self.logger.warning("Calibration exceeds both deviation bounds in a cell")

        if report_path is not None:
            report_path.parent.mkdir(parents=True, exist_ok=True)
            document = report.to_dict()  # type: ignore[attr-defined]
            report_path.write_text(json.dumps(document, indent=2) + "\n")
            self.logger.info(f"Wrote calibration report to {report_path}")
        return CalibrationOutcome(suite=suite, report=report)
