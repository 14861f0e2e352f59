import json
from pathlib import Path
from typing import Callable, Iterator, List

import pytest

from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.main import CLI
from forecast_planner.services.scenario_service import ScenarioService
from forecast_planner.utils.constants import TaskMode
from forecast_planner.utils.evaluation.scenario import Scenario, generate_scenario
from forecast_planner.utils.graph_core import Graph, generate_random_graph
from forecast_planner.utils.log_handlers import CliLogger

PRESETS_DIR = Path(__file__).parent.parent / "src" / "forecast_planner" / "presets"
GOLDEN_SCENARIO = PRESETS_DIR / "scenarios" / "support_relay.json"


@pytest.fixture
def logger() -> CliLogger:
    return CliLogger("fcplan-test")


@pytest.fixture
def quiet_ui() -> ConsoleUI:
    ui = ConsoleUI()
    ui.set_silent_mode(True)
    return ui


@pytest.fixture
def scenario_service(logger: CliLogger) -> ScenarioService:
    return ScenarioService(logger=logger)


@pytest.fixture
def path_graph() -> Graph:
    """0 - 1 - 2 - 3 - 4"""
    return Graph.from_edges(5, [[0, 1], [1, 2], [2, 3], [3, 4]])


@pytest.fixture
def golden_path() -> Path:
    return GOLDEN_SCENARIO


@pytest.fixture
def golden_document() -> dict:
    return json.loads(GOLDEN_SCENARIO.read_text())


@pytest.fixture
def golden_scenario(scenario_service: ScenarioService) -> Scenario:
    scenario, _ = scenario_service.load_scenario(GOLDEN_SCENARIO)
    return scenario


def small_instances(
    count: int,
    max_nodes: int = 6,
    max_robots: int = 2,
    max_adversaries: int = 2,
    max_horizon: int = 8,
) -> Iterator[Scenario]:
    """Deterministic stream of small random DSDG scenarios."""
    stays = (0.2, 0.5, 0.8, 1.0)
    for i in range(count):
        n = 3 + i % (max_nodes - 2)
        graph = generate_random_graph(n, 1.2 + 0.2 * (i % 3), seed=1000 + i)
        yield generate_scenario(
            graph,
            n_robots=1 + i % max_robots,
            n_adversaries=min(i % (max_adversaries + 1), graph.edge_count),
            stay=stays[i % len(stays)],
            task_mode=TaskMode.DSDG,
            seed=2000 + i,
            horizon=min(max_horizon, 2 * n),
        )


@pytest.fixture
def run_cli() -> Callable[[List[str]], int]:
    """Run the CLI in-process and return its exit code."""

    def run(args: List[str]) -> int:
        return CLI().run([str(a) for a in args])

    return run


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, object], Path]:
    def write(name: str, document: object) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path

    return write
