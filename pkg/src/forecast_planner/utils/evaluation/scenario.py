"""Planning scenarios and their random generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from forecast_planner.exceptions import ScenarioValidationError
from forecast_planner.utils.constants import DEFAULT_HORIZON_FACTOR, TaskMode
from forecast_planner.utils.forecast.adversary_forecast import AdversaryModel
from forecast_planner.utils.graph_core import Graph
from forecast_planner.utils.planner.joint_planner import CostParams
from forecast_planner.utils.support.support_alloc import SupportConfig
from forecast_planner.utils.task_models import RobotTask

MAX_GOAL_DRAWS = 1000


@dataclass(frozen=True)
class Scenario:
    graph: Graph
    adversaries: AdversaryModel
    tasks: Tuple[RobotTask, ...]
    task_mode: TaskMode
    horizon: int
    seed: int = 0
    params: CostParams = field(default_factory=CostParams)
    support: SupportConfig = field(default_factory=SupportConfig)

    def __post_init__(self) -> None:
        validate_scenario(self)


def default_horizon(g: Graph) -> int:
    return DEFAULT_HORIZON_FACTOR * g.node_count


def validate_scenario(scenario: Scenario) -> None:
    """Raise ScenarioValidationError on the first broken scenario invariant."""
    g = scenario.graph
    if scenario.horizon < 1:
        raise ScenarioValidationError(f"Horizon T must be >= 1, got {scenario.horizon}")
    scenario.adversaries.check_against(g)

    for i, task in enumerate(scenario.tasks):
        for node in (task.start, task.goal):
            if not 0 <= node < g.node_count:
                raise ScenarioValidationError(
                    f"Task {i} node {node} outside [0, {g.node_count})"
                )
        if task.start == task.goal:
            raise ScenarioValidationError(f"Task {i} starts at its goal {task.goal}")

    starts = [task.start for task in scenario.tasks]
    goals = [task.goal for task in scenario.tasks]
    if scenario.task_mode == TaskMode.DSDG:
        if len(set(starts)) != len(starts):
            raise ScenarioValidationError("DSDG tasks need pairwise distinct starts")
        if len(set(goals)) != len(goals):
            raise ScenarioValidationError("DSDG tasks need pairwise distinct goals")
    elif len(set(starts)) > 1 or len(set(goals)) > 1:
        raise ScenarioValidationError("SSSG tasks need one shared start and goal")


def generate_scenario(
    graph: Graph,
    n_robots: int,
    n_adversaries: int,
    stay: float,
    task_mode: TaskMode,
    seed: int,
    params: Optional[CostParams] = None,
    support: Optional[SupportConfig] = None,
    horizon: Optional[int] = None,
) -> Scenario:
    """Random tasks and distinct adversary start edges, deterministic per seed.

    The stay probability does not enter the draws, so instances generated
    with the same seed differ only in adversary mobility.
    """
    if n_robots < 0:
        raise ScenarioValidationError(f"Robot count must be >= 0, got {n_robots}")
    if n_adversaries > graph.edge_count:
        raise ScenarioValidationError(
            f"{n_adversaries} adversaries need distinct edges, "
            f"graph has {graph.edge_count}"
        )

    rng = np.random.default_rng(seed)
    n = graph.node_count
    if task_mode == TaskMode.DSDG:
        if n_robots > n:
            raise ScenarioValidationError(
                f"DSDG needs {n_robots} distinct starts, graph has {n} nodes"
            )
        starts = rng.choice(n, size=n_robots, replace=False)
        for _ in range(MAX_GOAL_DRAWS):
            goals = rng.choice(n, size=n_robots, replace=False)
            if not np.any(goals == starts):
                break
        else:
            raise ScenarioValidationError("Could not draw goals distinct from starts")
        tasks = tuple(RobotTask(int(s), int(g)) for s, g in zip(starts, goals))
    else:
        start = int(rng.integers(n))
        goal = int(rng.choice([x for x in range(n) if x != start]))
        tasks = tuple(RobotTask(start, goal) for _ in range(n_robots))

    initial = rng.choice(graph.edge_count, size=n_adversaries, replace=False)
    adversaries = AdversaryModel(
        count=n_adversaries,
        stay_prob=stay,
        initial_edges=tuple(int(e) for e in initial),
    )
    return Scenario(
        graph=graph,
        adversaries=adversaries,
        tasks=tasks,
        task_mode=task_mode,
        horizon=horizon if horizon is not None else default_horizon(graph),
        seed=seed,
        params=params or CostParams(),
        support=support or SupportConfig(),
    )
