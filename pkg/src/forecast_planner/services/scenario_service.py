import importlib.resources
import json
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml
from dataclasses_json.undefined import UndefinedParameterError
from injector import inject

from forecast_planner.exceptions import (
    GraphValidationError,
    PlannerError,
    ScenarioValidationError,
)
from forecast_planner.models.scenario_config import (
    AdversarySection,
    CostSection,
    ScenarioFile,
    SuiteGridConfig,
    SupportSection,
    TaskSection,
)
from forecast_planner.utils.constants import (
    PRESETS_PACKAGE,
    Allocator,
    Method,
    ScoringVariant,
    TaskMode,
)
from forecast_planner.utils.evaluation.scenario import (
    Scenario,
    default_horizon,
    generate_scenario,
)
from forecast_planner.utils.forecast.adversary_forecast import AdversaryModel
from forecast_planner.utils.graph_core import (
    Graph,
    graph_from_document,
    graph_to_document,
    parse_graph,
    serialize_graph,
)
from forecast_planner.utils.log_handlers import CliLogger
from forecast_planner.utils.planner.joint_planner import CostParams
from forecast_planner.utils.support.support_alloc import SupportConfig
from forecast_planner.utils.task_models import RobotTask
from forecast_planner.utils.validation.validator import (
    Validate,
    validate_node_id,
    validate_timeout,
    validate_trials,
)

GRID_PRESETS = ("full", "desk", "density", "calibration", "ablation")
DECODE_ERRORS = (
    KeyError,
    TypeError,
    ValueError,
    AttributeError,
    UndefinedParameterError,
)


def cost_params_from_section(section: CostSection) -> CostParams:
    try:
        return CostParams(
            r_a=section.r_a, r_p=section.r_p, wait=section.wait, support=section.support
        )
    except PlannerError as e:
        raise ScenarioValidationError(f"params: {e.message}") from e


def support_config_from_section(section: SupportSection) -> SupportConfig:
    try:
        return SupportConfig(
            k=section.k,
            s=section.s,
            alpha=section.alpha,
            beta=section.beta,
            variant=section.variant,
            coverage_radius=section.coverage_radius,
        )
    except PlannerError as e:
        raise ScenarioValidationError(f"support: {e.message}") from e


def _read_document(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioValidationError(f"Cannot read {path}: {e.strerror}") from e
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ScenarioValidationError(f"Malformed document {path}: {e}") from e


def _decode(model: Any, document: Any, what: str) -> Any:
    if not isinstance(document, dict):
        raise ScenarioValidationError(f"{what} must be a JSON/YAML object")
    try:
        return model.from_dict(document)
    except DECODE_ERRORS as e:
        raise ScenarioValidationError(f"Invalid {what}: {e}") from e


class ScenarioService:
    """Loads, validates, generates and writes scenario, graph and grid files."""

    @inject
    def __init__(self, logger: CliLogger) -> None:
        self.logger = logger

    def load_graph(self, path: Path) -> Graph:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise GraphValidationError(f"Cannot read {path}: {e.strerror}") from e
        graph = parse_graph(text)
        self.logger.debug(
            f"Loaded graph {path}: {graph.node_count} nodes, {graph.edge_count} edges"
        )
        return graph

    def write_graph(self, path: Path, graph: Graph) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_graph(graph), encoding="utf-8")

    def load_scenario_file(self, path: Path) -> ScenarioFile:
        return _decode(ScenarioFile, _read_document(path), f"scenario {path}")

    def load_scenario(self, path: Path) -> Tuple[Scenario, ScenarioFile]:
        scenario_file = self.load_scenario_file(path)
        scenario = self.build_scenario(scenario_file, path.parent)
        self.logger.info(
            f"Loaded scenario {path}: {scenario.graph.node_count} nodes, "
            f"{len(scenario.tasks)} robots, {scenario.adversaries.count} adversaries"
        )
        return scenario, scenario_file

    def build_scenario(self, scenario_file: ScenarioFile, base_dir: Path) -> Scenario:
        """Resolve a scenario document into a validated scenario."""
        graph = self._resolve_graph(scenario_file.graph, base_dir)

        adversaries = scenario_file.adversaries
        initial_edges = []
        for pair in adversaries.initial_edges:
            if not isinstance(pair, list) or len(pair) != 2:
                raise ScenarioValidationError(
                    f"Adversary initial edge {pair} must be a [u, v] pair"
                )
            try:
                initial_edges.append(graph.edge_id(*pair))
            except GraphValidationError as e:
                raise ScenarioValidationError(
                    f"Adversary initial edge: {e.message}"
                ) from e

        try:
            model = AdversaryModel(
                count=Validate.chain(adversaries.count, Validate.integer),
                stay_prob=Validate.chain(adversaries.stay, Validate.probability),
                initial_edges=tuple(initial_edges),
            )
            tasks = tuple(
                RobotTask(validate_node_id(t.start), validate_node_id(t.goal))
                for t in scenario_file.tasks
            )
            return Scenario(
                graph=graph,
                adversaries=model,
                tasks=tasks,
                task_mode=scenario_file.task_mode,
                horizon=(
                    scenario_file.horizon
                    if scenario_file.horizon is not None
                    else default_horizon(graph)
                ),
                seed=scenario_file.seed,
                params=cost_params_from_section(scenario_file.params),
                support=support_config_from_section(scenario_file.support),
            )
        except ScenarioValidationError:
            raise
        except PlannerError as e:
            raise ScenarioValidationError(e.message) from e

    def _resolve_graph(self, graph: Any, base_dir: Path) -> Graph:
        if isinstance(graph, str):
            return self.load_graph(base_dir / graph)
        try:
            return graph_from_document(graph)
        except GraphValidationError as e:
            raise ScenarioValidationError(f"Scenario graph: {e.message}") from e

    def scenario_to_file(
        self, scenario: Scenario, allocator: Allocator = Allocator.FORECAST_AWARE
    ) -> ScenarioFile:
        g = scenario.graph
        support = scenario.support
        return ScenarioFile(
            graph=graph_to_document(g),
            adversaries=AdversarySection(
                count=scenario.adversaries.count,
                stay=scenario.adversaries.stay_prob,
                initial_edges=[
                    list(g.edges[e]) for e in scenario.adversaries.initial_edges
                ],
            ),
            tasks=[TaskSection(start=t.start, goal=t.goal) for t in scenario.tasks],
            task_mode=scenario.task_mode,
            params=CostSection(
                r_a=scenario.params.r_a,
                r_p=scenario.params.r_p,
                wait=scenario.params.wait,
                support=scenario.params.support,
            ),
            support=SupportSection(
                k=support.k,
                s=support.s,
                alpha=support.alpha,
                beta=support.beta,
                variant=support.variant,
                allocator=allocator,
                coverage_radius=support.coverage_radius,
            ),
            horizon=scenario.horizon,
            seed=scenario.seed,
        )

    def write_scenario(self, path: Path, scenario: Scenario) -> None:
        scenario_file = self.scenario_to_file(scenario)
        document = scenario_file.to_dict(encode_json=True)  # type: ignore[attr-defined]
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")

    def generate(
        self,
        graph: Graph,
        n_robots: int,
        n_adversaries: int,
        stay: float,
        task_mode: TaskMode,
        seed: int,
        horizon: Optional[int] = None,
    ) -> Scenario:
        scenario = generate_scenario(
            graph, n_robots, n_adversaries, stay, task_mode, seed, horizon=horizon
        )
        self.logger.info(
            f"Generated {task_mode.value} scenario: tasks "
            f"{[(t.start, t.goal) for t in scenario.tasks]}, adversary edges "
            f"{[list(graph.edges[e]) for e in scenario.adversaries.initial_edges]}"
        )
        return scenario

    def load_grid(
        self, path: Optional[Path] = None, preset: Optional[str] = None
    ) -> SuiteGridConfig:
        """Load a suite grid from a JSON/YAML file or a packaged preset."""
        if (path is None) == (preset is None):
            raise ScenarioValidationError("Give exactly one of a grid file or a preset")
        if preset is not None:
            document = self.load_preset(preset)
            what = f"preset '{preset}'"
        else:
            document = _read_document(path)  # type: ignore[arg-type]
            what = f"grid {path}"
        grid = _decode(SuiteGridConfig, document, what)
        self.validate_grid(grid)
        return grid

    def load_preset(self, name: str) -> Dict[str, Any]:
        if name not in GRID_PRESETS:
            raise ScenarioValidationError(
                f"Unknown preset '{name}' (choose from {', '.join(GRID_PRESETS)})"
            )
        resource = importlib.resources.files(PRESETS_PACKAGE) / f"{name}.yaml"
        document = yaml.safe_load(resource.read_text(encoding="utf-8"))
        self.logger.debug(f"Loaded preset {name}")
        return document

    def load_golden_scenario(self, name: str) -> Tuple[Scenario, ScenarioFile]:
        resource = (
            importlib.resources.files(PRESETS_PACKAGE) / "scenarios" / f"{name}.json"
        )
        if not resource.is_file():
            raise ScenarioValidationError(f"Unknown golden scenario '{name}'")
        scenario_file = _decode(
            ScenarioFile, json.loads(resource.read_text(encoding="utf-8")), name
        )
        return self.build_scenario(scenario_file, Path(".")), scenario_file

    @staticmethod
    def validate_grid(grid: SuiteGridConfig) -> None:
        errors: List[str] = []

        def check(condition: bool, message: str) -> None:
            if not condition:
                errors.append(message)

        check(bool(grid.sizes), "sizes must not be empty")
        check(all(n >= 2 for n in grid.sizes), "every size must be >= 2")
        check(bool(grid.ratios), "ratios must not be empty")
        check(all(r > 0 for r in grid.ratios), "every ratio must be > 0")
        check(bool(grid.configs), "configs must not be empty")
        check(
            all(c.robots >= 1 and c.adversaries >= 0 for c in grid.configs),
            "configs need robots >= 1 and adversaries >= 0",
        )
        check(bool(grid.stays), "stays must not be empty")
        check(all(0.0 <= s <= 1.0 for s in grid.stays), "stays must lie in [0, 1]")
        check(grid.instances >= 1, "instances must be >= 1")
        check(grid.seeds >= 1, "seeds must be >= 1")
        check(bool(grid.variants), "variants must not be empty")
        check(bool(grid.task_modes), "task_modes must not be empty")
        check(grid.horizon_factor >= 1, "horizon_factor must be >= 1")
        check(grid.trials >= 1, "trials must be >= 1")
        check(grid.timeout_s > 0, "timeout_s must be > 0")
        if errors:
            raise ScenarioValidationError("Invalid grid: " + "; ".join(errors))
        cost_params_from_section(grid.params)
        support_config_from_section(grid.support)


def override_grid(
    grid: SuiteGridConfig,
    master_seed: Optional[int] = None,
    timeout_s: Optional[float] = None,
    trials: Optional[int] = None,
    methods: Optional[Sequence[Method]] = None,
    variants: Optional[Sequence[ScoringVariant]] = None,
) -> SuiteGridConfig:
    """Apply command-line overrides on top of a loaded grid."""
    changes: Dict[str, Any] = {}
    if master_seed is not None:
        changes["master_seed"] = Validate.chain(master_seed, Validate.integer)
    if timeout_s is not None:
        changes["timeout_s"] = validate_timeout(timeout_s)
    if trials is not None:
        changes["trials"] = validate_trials(trials)
    if methods:
        changes["methods"] = list(dict.fromkeys(methods))
    if variants:
        changes["variants"] = list(dict.fromkeys(variants))
    if not changes:
        return grid
    grid = replace(grid, **changes)
    ScenarioService.validate_grid(grid)
    return grid
