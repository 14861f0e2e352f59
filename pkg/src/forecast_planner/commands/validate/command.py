from pathlib import Path
from typing import Any, Dict, Optional

import click
from injector import inject

from forecast_planner.core.command_base import CommandBase
from forecast_planner.core.decorators import argument, command, option
from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.services.validation_service import (
    DocumentKind,
    ValidationService,
)


@command("validate")
class ValidateDocument(CommandBase):
    """Schema-check a graph, scenario, grid, plan, result or results CSV file.

    Examples:

    \b
        fcplan validate scenario.json
        fcplan validate grid.yaml --kind grid
        fcplan validate plan.json --scenario scenario.json
    """

    @inject
    def __init__(self, validation_service: ValidationService, ui: ConsoleUI) -> None:
        self.validation_service = validation_service
        self.ui = ui

    @argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
    @option(
        "--kind",
        type=click.Choice([k.value for k in DocumentKind]),
        default=DocumentKind.AUTO.value,
        show_default=True,
    )
    @option(
        "--scenario",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Replay a plan file against this scenario's feasibility rules",
    )
    def execute(
        self,
        path: Path,
        kind: str = DocumentKind.AUTO.value,
        scenario: Optional[Path] = None,
        **kwargs: Any,
    ) -> Dict[str, Any]:
        """Validate one file; invalid files exit with code 1."""
        check = self.validation_service.validate(path, DocumentKind(kind), scenario)
        return ValidationService.describe(check)

    def output(self, result: Dict[str, Any]) -> None:
        self.ui.display_result("Valid", result)
