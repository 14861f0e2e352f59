from pathlib import Path
from typing import Any, Dict, Optional

import click
from injector import inject

from forecast_planner.core.command_base import CommandBase
from forecast_planner.core.decorators import command, option
from forecast_planner.core.interactive.ui import ConsoleUI
from forecast_planner.services.scenario_service import ScenarioService
from forecast_planner.utils.constants import TaskMode
from forecast_planner.utils.graph_core import generate_random_graph
from forecast_planner.utils.log_handlers import CliLogger


@command("gen")
class Gen(CommandBase):
    """Generate a random connected graph, or a full scenario around one.

    Examples:

    \b
        fcplan gen --nodes 10 --ratio 1.6 --seed 1 --out graph.json
        fcplan gen --nodes 10 --robots 2 --adversaries 4 --stay 0.5 --out s.json
    """

    @inject
    def __init__(
        self, scenario_service: ScenarioService, ui: ConsoleUI, logger: CliLogger
    ) -> None:
        self.scenario_service = scenario_service
        self.ui = ui
        self.logger = logger

    @option("--nodes", "-n", type=int, required=True, help="Number of nodes")
    @option("--ratio", type=float, default=1.6, show_default=True, help="Edges/nodes")
    @option("--seed", type=int, default=0, show_default=True, help="Generator seed")
    @option(
        "--out",
        required=True,
        type=click.Path(dir_okay=False, path_type=Path),
        help="Output graph or scenario JSON",
    )
    @option("--robots", type=int, help="Also sample tasks for this many robots")
    @option("--adversaries", type=int, default=0, show_default=True)
    @option("--stay", type=float, default=0.5, show_default=True)
    @option(
        "--task-mode",
        type=click.Choice([m.value for m in TaskMode]),
        default=TaskMode.DSDG.value,
        show_default=True,
    )
    @option("--horizon", "-T", type=int, help="Scenario horizon (default 2|V|)")
    def execute(
        self,
        nodes: int,
        ratio: float,
        seed: int,
        out: Path,
        robots: Optional[int] = None,
        adversaries: int = 0,
        stay: float = 0.5,
        task_mode: str = TaskMode.DSDG.value,
        horizon: Optional[int] = None,
        **kwargs: Any,
    ) -> Dict[str, Any]:
        """Generate a graph file, or a scenario file when --robots is given."""
        graph = generate_random_graph(nodes, ratio, seed)
        result: Dict[str, Any] = {
            "out": str(out),
            "nodes": graph.node_count,
            "edges": graph.edge_count,
            "kind": "graph",
        }
        if robots is None:
            self.scenario_service.write_graph(out, graph)
        else:
            scenario = self.scenario_service.generate(
                graph,
                robots,
                adversaries,
                stay,
                TaskMode(task_mode),
                seed,
                horizon=horizon,
            )
            self.scenario_service.write_scenario(out, scenario)
            result.update(kind="scenario", robots=robots, adversaries=adversaries)
        self.logger.info(f"Wrote {result['kind']} to {out}")
        return result

    def output(self, result: Dict[str, Any]) -> None:
        self.ui.display_info(
            f"Wrote {result['kind']} {result['out']}: {result['nodes']} nodes, "
            f"{result['edges']} edges, connected"
        )
