from injector import Binder, Module, provider, singleton

from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.services.evaluation.calibration_service import (
    CalibrationService,
)
from forecast_planner.services.evaluation.method_runner import MethodRunner
from forecast_planner.services.evaluation.suite_service import SuiteService
from forecast_planner.services.scenario_service import ScenarioService
from forecast_planner.services.validation_service import ValidationService

PLANNER_SERVICES = (
    ScenarioService,
    MethodRunner,
    SuiteService,
    CalibrationService,
    ValidationService,
)


class BaseModule(Module):
    """Console UI and planner services, one instance each per CLI run."""

    def configure(self, binder: Binder) -> None:
        for service in PLANNER_SERVICES:
            binder.bind(service, scope=singleton)

    @singleton
    @provider
    def provide_console_ui(self) -> ConsoleUI:
        # Tables, panels and suite progress bars share one console
        return ConsoleUI()
