"""Joint multi-robot planning over the time-expanded graph.

All robots advance one synchronized step per expansion. A step moving
along edge e from time t to t+1 is priced with the forecast risk at t;
supporting robots cancel the penalty on the edge they cover.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import (
    Callable,
    Dict,
    FrozenSet,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

from forecast_planner.exceptions import SearchSpaceLimitError, ValidationError
from forecast_planner.utils.constants import (
    DEFAULT_BASE_COST,
    DEFAULT_PENALTY,
    DEFAULT_SUPPORT_COST,
    DEFAULT_WAIT_COST,
    MAX_EXHAUSTIVE_STATES,
    ActionType,
    PlanStatus,
)
from forecast_planner.utils.forecast.adversary_forecast import RiskForecast
from forecast_planner.utils.graph_core import Graph
from forecast_planner.utils.support.support_alloc import SupportMap
from forecast_planner.utils.task_models import RobotTask

MoveCost = Callable[[int, int, bool], float]
StateKey = Tuple[int, Tuple[int, ...], Tuple[bool, ...]]

_ACTION_RANK = {
    ActionType.DONE: 0,
    ActionType.WAIT: 1,
    ActionType.MOVE: 2,
    ActionType.SUPPORT: 3,
}


@dataclass(frozen=True)
class CostParams:
    r_a: float = DEFAULT_BASE_COST
    r_p: float = DEFAULT_PENALTY
    wait: float = DEFAULT_WAIT_COST
    support: float = DEFAULT_SUPPORT_COST

    def __post_init__(self) -> None:
        for name in ("r_a", "r_p", "wait", "support"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"Cost parameter {name} must be > 0")


@dataclass(frozen=True)
class RobotAction:
    kind: ActionType
    node: Optional[int] = None
    edge: Optional[int] = None

    @classmethod
    def wait(cls) -> RobotAction:
        return cls(ActionType.WAIT)

    @classmethod
    def move(cls, to: int) -> RobotAction:
        return cls(ActionType.MOVE, node=to)

    @classmethod
    def support(cls, edge: int) -> RobotAction:
        return cls(ActionType.SUPPORT, edge=edge)

    @classmethod
    def done(cls) -> RobotAction:
        return cls(ActionType.DONE)

    @property
    def sort_key(self) -> Tuple[int, int]:
        target = self.node if self.node is not None else self.edge
        return _ACTION_RANK[self.kind], -1 if target is None else target


JointAction = Tuple[RobotAction, ...]


class JointState(NamedTuple):
    t: int
    positions: Tuple[int, ...]
    done: Tuple[bool, ...]

    @property
    def finished(self) -> bool:
        return all(self.done)


@dataclass(frozen=True)
class SupportEvent:
    supporter: int
    node: int
    edge: int
    t: int


@dataclass(frozen=True)
class Plan:
    actions: Tuple[Tuple[RobotAction, ...], ...]
    makespan: int
    j_exp: float
    per_step_costs: Tuple[float, ...]
    support_activations: FrozenSet[Tuple[int, int]]
    paths: Tuple[Tuple[int, ...], ...] = ()
    support_events: Tuple[SupportEvent, ...] = ()

    @property
    def wait_count(self) -> int:
        return sum(a.kind == ActionType.WAIT for row in self.actions for a in row)


@dataclass(frozen=True)
class PlanOutcome:
    status: PlanStatus
    plan: Optional[Plan] = None
    elapsed_s: float = 0.0
    expansions: int = 0

    @property
    def solved(self) -> bool:
        return self.status == PlanStatus.SOLVED


@dataclass(frozen=True)
class PlanningProblem:
    """Everything a search needs about one instance."""

    graph: Graph
    risk_forecast: RiskForecast
    support_map: SupportMap
    tasks: Tuple[RobotTask, ...]
    params: CostParams
    horizon: int

    def initial_state(self) -> JointState:
        return JointState(
            t=0,
            positions=tuple(task.start for task in self.tasks),
            done=tuple(task.start == task.goal for task in self.tasks),
        )


@dataclass(frozen=True)
class PlanValidation:
    ok: bool
    violation: Optional[str] = None


@dataclass
class _SearchTree:
    parents: Dict[StateKey, Tuple[StateKey, JointAction, float]] = field(
        default_factory=dict
    )
    best_g: Dict[StateKey, float] = field(default_factory=dict)


def expected_move_cost(
    edge: int, t: int, supported: bool, risk_forecast: RiskForecast, params: CostParams
) -> float:
    rho = risk_forecast.edge_risk(t, edge)
    return params.r_a + params.r_p * rho * (1.0 - float(supported))


def _move_edge(g: Graph, position: int, action: RobotAction) -> Optional[int]:
    if action.kind != ActionType.MOVE:
        return None
    return g.edge_id(position, action.node)


class _DeadlineReached(Exception):
    pass


def _crossable_by_teammate(g: Graph, state: JointState, robot: int, edge: int) -> bool:
    u, v = g.edges[edge]
    return any(
        not done and position in (u, v)
        for j, (position, done) in enumerate(zip(state.positions, state.done))
        if j != robot
    )


def _successors(
    state: JointState,
    problem: PlanningProblem,
    move_cost: MoveCost,
    deadline: Optional[float] = None,
) -> List[Tuple[JointAction, JointState, float]]:
    if state.finished or state.t >= problem.horizon:
        return []

    g = problem.graph
    options: List[List[RobotAction]] = []
    for i, (position, done) in enumerate(zip(state.positions, state.done)):
        if done:
            options.append([RobotAction.done()])
            continue
        robot_options = [RobotAction.wait()]
        robot_options.extend(RobotAction.move(nb) for nb in g.neighbors(position))
        # Only edges a teammate can cross this step are worth supporting
        robot_options.extend(
            RobotAction.support(e)
            for e in problem.support_map.edges_supported_from(position)
            if _crossable_by_teammate(g, state, i, e)
        )
        options.append(robot_options)

    params = problem.params
    successors = []
    for joint in itertools.product(*options):
        if deadline is not None and time.monotonic() > deadline:
            raise _DeadlineReached
        crossings = [
            _move_edge(g, position, action)
            for position, action in zip(state.positions, joint)
        ]
        supported = set()
        valid = True
        for i, action in enumerate(joint):
            if action.kind != ActionType.SUPPORT:
                continue
            # Support needs a teammate crossing the covered edge this step
            if not any(
                crossings[j] == action.edge for j in range(len(joint)) if j != i
            ):
                valid = False
                break
            supported.add(action.edge)
        if not valid:
            continue

        cost = 0.0
        positions = list(state.positions)
        done = list(state.done)
        for i, action in enumerate(joint):
            if action.kind == ActionType.WAIT:
                cost += params.wait
            elif action.kind == ActionType.SUPPORT:
                cost += params.support
            elif action.kind == ActionType.MOVE:
                edge = crossings[i]
                cost += move_cost(edge, state.t, edge in supported)
                positions[i] = action.node
                done[i] = action.node == problem.tasks[i].goal
        successors.append(
            (joint, JointState(state.t + 1, tuple(positions), tuple(done)), cost)
        )

    successors.sort(key=lambda item: _joint_key(item[0]))
    return successors


def _joint_key(joint: JointAction) -> Tuple[Tuple[int, int], ...]:
    return tuple(action.sort_key for action in joint)


def _lazy_move_cost(problem: PlanningProblem) -> MoveCost:
    def lazy_cost(edge: int, t: int, supported: bool) -> float:
        return expected_move_cost(
            edge, t, supported, problem.risk_forecast, problem.params
        )

    return lazy_cost


def joint_successors(
    state: JointState, problem: PlanningProblem
) -> List[Tuple[JointAction, JointState, float]]:
    """Feasible joint actions from state, with the resulting state and step cost."""
    return _successors(state, problem, _lazy_move_cost(problem))


def heuristic(
    state: JointState, g: Graph, tasks: Sequence[RobotTask], params: CostParams
) -> float:
    """Risk-blind remaining hops times base cost; admissible and consistent."""
    return sum(
        g.hop_distance(position, task.goal) * params.r_a
        for position, task, done in zip(state.positions, tasks, state.done)
        if not done
    )


def _reachable(state: JointState, problem: PlanningProblem) -> bool:
    slack = problem.horizon - state.t
    return all(
        done or problem.graph.hop_distance(position, task.goal) <= slack
        for position, task, done in zip(state.positions, problem.tasks, state.done)
    )


def _build_plan(
    problem: PlanningProblem, tree: _SearchTree, goal_key: StateKey
) -> Plan:
    steps: List[Tuple[StateKey, JointAction, float]] = []
    key = goal_key
    while key in tree.parents:
        parent, joint, cost = tree.parents[key]
        steps.append((parent, joint, cost))
        key = parent
    steps.reverse()

    n_robots = len(problem.tasks)
    actions: List[List[RobotAction]] = [[] for _ in range(n_robots)]
    paths: List[List[int]] = [[task.start] for task in problem.tasks]
    activations = set()
    events = []
    for (t, positions, done), joint, _ in steps:
        for i, action in enumerate(joint):
            actions[i].append(action)
            if action.kind == ActionType.SUPPORT:
                activations.add((action.edge, t))
                events.append(SupportEvent(i, positions[i], action.edge, t))
            if done[i]:
                continue
            if action.kind == ActionType.MOVE:
                paths[i].append(action.node)
            else:
                paths[i].append(positions[i])

    per_step = tuple(cost for _, _, cost in steps)
    return Plan(
        actions=tuple(tuple(row) for row in actions),
        makespan=len(steps),
        j_exp=sum(per_step),
        per_step_costs=per_step,
        support_activations=frozenset(activations),
        paths=tuple(tuple(p) for p in paths),
        support_events=tuple(events),
    )


def solve_lazy_astar(
    problem: PlanningProblem,
    timeout_s: Optional[float] = None,
    on_expand: Optional[Callable[[JointState], None]] = None,
) -> PlanOutcome:
    """A* over joint states; risk is looked up only when a move is generated.

    Open-list ties go to lower f, then higher g, then the lexicographically
    smallest joint action. The deadline is checked before every pop and
    while a state's joint actions are enumerated.
    """
    started = time.monotonic()
    deadline = None if timeout_s is None else started + timeout_s
    g = problem.graph
    tasks = problem.tasks
    params = problem.params
    move_cost = _lazy_move_cost(problem)
    start = problem.initial_state()
    start_key: StateKey = tuple(start)  # type: ignore[assignment]

    tree = _SearchTree()
    tree.best_g[start_key] = 0.0
    closed = set()
    counter = itertools.count()
    open_list = [
        (heuristic(start, g, tasks, params), -0.0, (), start_key, next(counter))
    ]
    expansions = 0

    def timed_out() -> PlanOutcome:
        return PlanOutcome(
            PlanStatus.TIMEOUT,
            elapsed_s=time.monotonic() - started,
            expansions=expansions,
        )

    while open_list:
        if deadline is not None and time.monotonic() > deadline:
            return timed_out()

        _, neg_g, _, key, _ = heapq.heappop(open_list)
        g_value = -neg_g
        if key in closed or g_value > tree.best_g[key]:
            continue
        closed.add(key)
        state = JointState(*key)

        if state.finished:
            return PlanOutcome(
                PlanStatus.SOLVED,
                plan=_build_plan(problem, tree, key),
                elapsed_s=time.monotonic() - started,
                expansions=expansions,
            )

        expansions += 1
        if on_expand is not None:
            on_expand(state)

        try:
            successors = _successors(state, problem, move_cost, deadline)
        except _DeadlineReached:
            return timed_out()

        for joint, nxt, cost in successors:
            if not _reachable(nxt, problem):
                continue
            next_key: StateKey = tuple(nxt)  # type: ignore[assignment]
            candidate = g_value + cost
            if next_key in closed or candidate >= tree.best_g.get(next_key, math.inf):
                continue
            tree.best_g[next_key] = candidate
            tree.parents[next_key] = (key, joint, cost)
            heapq.heappush(
                open_list,
                (
                    candidate + heuristic(nxt, g, tasks, params),
                    -candidate,
                    _joint_key(joint),
                    next_key,
                    next(counter),
                ),
            )

    return PlanOutcome(
        PlanStatus.INFEASIBLE,
        elapsed_s=time.monotonic() - started,
        expansions=expansions,
    )


def plan_lazy_astar(
    g: Graph,
    risk_forecast: RiskForecast,
    support_map: SupportMap,
    tasks: Sequence[RobotTask],
    params: CostParams,
    horizon: int,
    timeout_s: Optional[float] = None,
    on_expand: Optional[Callable[[JointState], None]] = None,
) -> PlanOutcome:
    problem = make_problem(g, risk_forecast, support_map, tasks, params, horizon)
    return solve_lazy_astar(problem, timeout_s=timeout_s, on_expand=on_expand)


def make_problem(
    g: Graph,
    risk_forecast: RiskForecast,
    support_map: SupportMap,
    tasks: Sequence[RobotTask],
    params: CostParams,
    horizon: int,
) -> PlanningProblem:
    if horizon > risk_forecast.horizon:
        raise ValidationError(
            f"Planning horizon {horizon} exceeds forecast horizon "
            f"{risk_forecast.horizon}"
        )
    for task in tasks:
        for node in (task.start, task.goal):
            if not 0 <= node < g.node_count:
                raise ValidationError(f"Task node {node} outside [0, {g.node_count})")
    return PlanningProblem(
        graph=g,
        risk_forecast=risk_forecast,
        support_map=support_map,
        tasks=tuple(tasks),
        params=params,
        horizon=horizon,
    )


def _cost_table(problem: PlanningProblem) -> MoveCost:
    """Unsupported move costs for every (t, edge), computed up front."""
    params = problem.params
    table = params.r_a + params.r_p * problem.risk_forecast.risk[: problem.horizon]

    def tabulated(edge: int, t: int, supported: bool) -> float:
        return params.r_a if supported else float(table[t, edge])

    return tabulated


def _uniform_cost_search(
    problem: PlanningProblem, start: JointState, move_cost: MoveCost
) -> Tuple[float, Optional[StateKey], _SearchTree]:
    start_key: StateKey = tuple(start)  # type: ignore[assignment]
    tree = _SearchTree()
    tree.best_g[start_key] = 0.0
    closed = set()
    frontier = [(0.0, (), start_key)]

    while frontier:
        g_value, _, key = heapq.heappop(frontier)
        if key in closed or g_value > tree.best_g[key]:
            continue
        closed.add(key)
        state = JointState(*key)
        if state.finished:
            return g_value, key, tree
        for joint, nxt, cost in _successors(state, problem, move_cost):
            next_key: StateKey = tuple(nxt)  # type: ignore[assignment]
            candidate = g_value + cost
            if next_key in closed or candidate >= tree.best_g.get(next_key, math.inf):
                continue
            tree.best_g[next_key] = candidate
            tree.parents[next_key] = (key, joint, cost)
            heapq.heappush(frontier, (candidate, _joint_key(joint), next_key))

    return math.inf, None, tree


def exhaustive_state_bound(problem: PlanningProblem) -> int:
    return (problem.horizon + 1) * (2 * problem.graph.node_count) ** len(problem.tasks)


def exhaustive_plan(
    g: Graph,
    risk_forecast: RiskForecast,
    support_map: SupportMap,
    tasks: Sequence[RobotTask],
    params: CostParams,
    horizon: int,
) -> PlanOutcome:
    """Optimal plan by uniform-cost search with precomputed costs and no heuristic."""
    started = time.monotonic()
    problem = make_problem(g, risk_forecast, support_map, tasks, params, horizon)
    bound = exhaustive_state_bound(problem)
    if bound > MAX_EXHAUSTIVE_STATES:
        raise SearchSpaceLimitError(bound, MAX_EXHAUSTIVE_STATES)

    _, goal_key, tree = _uniform_cost_search(
        problem, problem.initial_state(), _cost_table(problem)
    )
    elapsed = time.monotonic() - started
    if goal_key is None:
        return PlanOutcome(PlanStatus.INFEASIBLE, elapsed_s=elapsed)
    return PlanOutcome(
        PlanStatus.SOLVED,
        plan=_build_plan(problem, tree, goal_key),
        elapsed_s=elapsed,
        expansions=len(tree.best_g),
    )


def optimal_cost_to_go(state: JointState, problem: PlanningProblem) -> float:
    """Cheapest cost from state to all robots done by T; inf if unreachable."""
    cost, _, _ = _uniform_cost_search(problem, state, _cost_table(problem))
    return cost


def replay_cost(
    plan: Plan,
    g: Graph,
    tasks: Sequence[RobotTask],
    params: CostParams,
    move_penalty: Callable[[int, int], float],
) -> float:
    """Re-price a plan's action sequences step by step.

    ``move_penalty(edge, t)`` gives the penalty weight (risk or realized
    occupancy) of an unsupported crossing.
    """
    positions = [task.start for task in tasks]
    total = 0.0
    for t in range(plan.makespan):
        for i in range(len(tasks)):
            action = plan.actions[i][t]
            if action.kind == ActionType.WAIT:
                total += params.wait
            elif action.kind == ActionType.SUPPORT:
                total += params.support
            elif action.kind == ActionType.MOVE:
                edge = g.edge_id(positions[i], action.node)
                cost = params.r_a
                if (edge, t) not in plan.support_activations:
                    cost += params.r_p * move_penalty(edge, t)
                total += cost
                positions[i] = action.node
    return total


def validate_plan(
    plan: Plan,
    g: Graph,
    support_map: SupportMap,
    tasks: Sequence[RobotTask],
    horizon: int,
) -> PlanValidation:
    """Check a plan against the feasibility rules; report the first violation."""
    if plan.makespan > horizon:
        return PlanValidation(
            False, f"makespan {plan.makespan} exceeds horizon {horizon}"
        )
    if len(plan.actions) != len(tasks):
        return PlanValidation(
            False, f"plan has {len(plan.actions)} robots, expected {len(tasks)}"
        )
    for i, row in enumerate(plan.actions):
        if len(row) != plan.makespan:
            return PlanValidation(
                False, f"robot {i} has {len(row)} actions for makespan {plan.makespan}"
            )

    positions = [task.start for task in tasks]
    done = [task.start == task.goal for task in tasks]
    activations = set()
    for t in range(plan.makespan):
        joint = [plan.actions[i][t] for i in range(len(tasks))]
        crossings: List[Optional[int]] = []
        for i, action in enumerate(joint):
            if done[i]:
                if action.kind != ActionType.DONE:
                    return PlanValidation(
                        False, f"robot {i} acts at t={t} after reaching its goal"
                    )
                crossings.append(None)
                continue
            if action.kind == ActionType.DONE:
                return PlanValidation(
                    False, f"robot {i} is marked done at t={t} before its goal"
                )
            if action.kind == ActionType.MOVE:
                if action.node is None or not g.has_edge(positions[i], action.node):
                    return PlanValidation(
                        False,
                        f"robot {i} moves {positions[i]}->{action.node} at t={t} "
                        "along a non-edge",
                    )
                crossings.append(g.edge_id(positions[i], action.node))
            else:
                crossings.append(None)

        for i, action in enumerate(joint):
            if action.kind != ActionType.SUPPORT or done[i]:
                continue
            if not support_map.allows(positions[i], action.edge):
                return PlanValidation(
                    False,
                    f"robot {i} supports edge {action.edge} from node {positions[i]} "
                    f"at t={t} outside the support map",
                )
            if not any(
                crossings[j] == action.edge for j in range(len(joint)) if j != i
            ):
                return PlanValidation(
                    False,
                    f"robot {i} supports edge {action.edge} at t={t} "
                    "while no teammate crosses it",
                )
            activations.add((action.edge, t))

        for i, action in enumerate(joint):
            if action.kind == ActionType.MOVE and not done[i]:
                positions[i] = action.node
                done[i] = action.node == tasks[i].goal

    for i, reached in enumerate(done):
        if not reached:
            return PlanValidation(
                False, f"robot {i} never reaches goal {tasks[i].goal}"
            )
    if activations != set(plan.support_activations):
        return PlanValidation(False, "support activations do not match the actions")
    return PlanValidation(True)
