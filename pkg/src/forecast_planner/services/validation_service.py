import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from injector import inject

from forecast_planner.exceptions import PlannerError, ScenarioValidationError
from forecast_planner.models.result_models import PlanDocument, RunReport, SuiteRow
from forecast_planner.services.scenario_service import DECODE_ERRORS, ScenarioService
from forecast_planner.utils.constants import RESULT_CSV_COLUMNS
from forecast_planner.utils.graph_core import parse_graph
from forecast_planner.utils.log_handlers import CliLogger
from forecast_planner.utils.planner.joint_planner import validate_plan
from forecast_planner.utils.planner.plan_io import (
    plan_from_document,
    support_map_from_documents,
)


class DocumentKind(str, Enum):
    AUTO = "auto"
    GRAPH = "graph"
    SCENARIO = "scenario"
    GRID = "grid"
    PLAN = "plan"
    RESULT = "result"
    CSV = "csv"


@dataclass
class DocumentCheck:
    path: Path
    kind: DocumentKind
    summary: str


def detect_kind(path: Path, document: Any) -> DocumentKind:
    """Guess a document's kind from its suffix and top-level keys."""
    if path.suffix.lower() == ".csv":
        return DocumentKind.CSV
    if isinstance(document, dict):
        keys = set(document)
        if keys <= {"nodes", "edges"} and keys:
            return DocumentKind.GRAPH
        if "adversaries" in keys and "tasks" in keys:
            return DocumentKind.SCENARIO
        if "sizes" in keys and "configs" in keys:
            return DocumentKind.GRID
        if "results" in keys:
            return DocumentKind.RESULT
        if "status" in keys:
            return DocumentKind.PLAN
    raise ScenarioValidationError(
        f"Cannot tell what kind of document {path} is; pass --kind"
    )


class ValidationService:
    """Schema-checks any input or output file of the CLI."""

    @inject
    def __init__(self, logger: CliLogger, scenario_service: ScenarioService) -> None:
        self.logger = logger
        self.scenario_service = scenario_service

    def validate(
        self,
        path: Path,
        kind: DocumentKind = DocumentKind.AUTO,
        scenario_path: Optional[Path] = None,
    ) -> DocumentCheck:
        document = None
        if kind != DocumentKind.CSV and path.suffix.lower() != ".csv":
            document = self._load(path)
        if kind == DocumentKind.AUTO:
            kind = detect_kind(path, document)
        self.logger.debug(f"Validating {path} as {kind.value}")

        if kind == DocumentKind.GRAPH:
            graph = parse_graph(path.read_text(encoding="utf-8"))
            summary = f"{graph.node_count} nodes, {graph.edge_count} edges, connected"
        elif kind == DocumentKind.SCENARIO:
            scenario, _ = self.scenario_service.load_scenario(path)
            summary = (
                f"{scenario.graph.node_count} nodes, {len(scenario.tasks)} robots, "
                f"{scenario.adversaries.count} adversaries, T={scenario.horizon}"
            )
        elif kind == DocumentKind.GRID:
            grid = self.scenario_service.load_grid(path)
            summary = (
                f"{len(grid.sizes)} sizes, {len(grid.ratios)} ratios, "
                f"{len(grid.configs)} configs, {len(grid.stays)} stays"
            )
        elif kind == DocumentKind.PLAN:
            summary = self._validate_plan(path, document, scenario_path)
        elif kind == DocumentKind.RESULT:
            report = self._decode(RunReport, document, path)
            summary = f"{len(report.results)} method results"
        else:
            summary = self._validate_csv(path)
        return DocumentCheck(path=path, kind=kind, summary=summary)

    def _load(self, path: Path) -> Any:
        try:
            return yaml.safe_load(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ScenarioValidationError(f"Cannot read {path}: {e.strerror}") from e
        except yaml.YAMLError as e:
            raise ScenarioValidationError(f"Malformed document {path}: {e}") from e

    def _decode(self, model: Any, document: Any, path: Path) -> Any:
        if not isinstance(document, dict):
            raise ScenarioValidationError(f"{path} must hold a JSON object")
        try:
            return model.from_dict(document)
        except DECODE_ERRORS as e:
            raise ScenarioValidationError(f"Invalid {path}: {e}") from e

    def _validate_plan(
        self, path: Path, document: Any, scenario_path: Optional[Path]
    ) -> str:
        plan_document: PlanDocument = self._decode(PlanDocument, document, path)
        if scenario_path is None:
            status = plan_document.status.value
            return f"status {status}, {len(plan_document.robots)} robots"

        scenario, _ = self.scenario_service.load_scenario(scenario_path)
        try:
            plan = plan_from_document(plan_document, scenario.graph)
            support_map = support_map_from_documents(
                plan_document.support_map, scenario.graph
            )
        except PlannerError as e:
            raise ScenarioValidationError(f"Invalid plan {path}: {e.message}") from e
        check = validate_plan(
            plan, scenario.graph, support_map, scenario.tasks, scenario.horizon
        )
        if not check.ok:
            raise ScenarioValidationError(f"Infeasible plan {path}: {check.violation}")
        return f"feasible plan, makespan {plan.makespan}, j_exp {plan.j_exp:.4f}"

    def _validate_csv(self, path: Path) -> str:
        try:
            with open(path, newline="") as f:
                reader = csv.DictReader(f)
                if reader.fieldnames != RESULT_CSV_COLUMNS:
                    raise ScenarioValidationError(
                        f"{path} header {reader.fieldnames} != {RESULT_CSV_COLUMNS}"
                    )
                rows = [SuiteRow.from_csv_row(row) for row in reader]
        except OSError as e:
            raise ScenarioValidationError(f"Cannot read {path}: {e.strerror}") from e
        except (KeyError, ValueError) as e:
            raise ScenarioValidationError(f"Invalid row in {path}: {e}") from e
        keys = [row.key() for row in rows]
        if len(set(keys)) != len(keys):
            raise ScenarioValidationError(f"{path} repeats a run coordinate")
        return f"{len(rows)} result rows"

    @staticmethod
    def describe(check: DocumentCheck) -> Dict[str, Any]:
        return {"file": str(check.path), "kind": check.kind.value, "ok": check.summary}
