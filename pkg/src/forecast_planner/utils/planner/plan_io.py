"""Conversion between plans and plan JSON documents."""

from typing import Any, Dict, List, Optional

from forecast_planner.exceptions import ScenarioValidationError
from forecast_planner.models.result_models import (
    PlanDocument,
    RobotPlanDocument,
    SupportActivationDocument,
    SupportAssignmentDocument,
    SupportEventDocument,
)
from forecast_planner.utils.constants import ActionType
from forecast_planner.utils.graph_core import Graph
from forecast_planner.utils.planner.joint_planner import (
    Plan,
    PlanOutcome,
    RobotAction,
    SupportEvent,
)
from forecast_planner.utils.support.support_alloc import SupportMap


def action_to_document(action: RobotAction, g: Graph) -> Dict[str, Any]:
    if action.kind == ActionType.MOVE:
        return {"type": "move", "to": action.node}
    if action.kind == ActionType.SUPPORT:
        u, v = g.edges[action.edge]
        return {"type": "support", "edge": [u, v]}
    return {"type": action.kind.value}


def action_from_document(document: Dict[str, Any], g: Graph) -> RobotAction:
    try:
        kind = ActionType(document["type"])
        if kind == ActionType.MOVE:
            return RobotAction.move(int(document["to"]))
        if kind == ActionType.SUPPORT:
            u, v = document["edge"]
            return RobotAction.support(g.edge_id(u, v))
        return RobotAction(kind)
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioValidationError(f"Invalid plan action {document}: {e}") from e


def outcome_to_document(
    outcome: PlanOutcome,
    g: Graph,
    support_map: Optional[SupportMap] = None,
    method: Optional[str] = None,
) -> PlanDocument:
    assignments = [
        SupportAssignmentDocument(**entry)
        for entry in (support_map.to_documents(g) if support_map else [])
    ]
    plan = outcome.plan
    if plan is None:
        return PlanDocument(
            status=outcome.status, method=method, support_map=assignments
        )

    robots = [
        RobotPlanDocument(actions=[action_to_document(a, g) for a in row])
        for row in plan.actions
    ]
    supports = [
        SupportActivationDocument(edge=list(g.edges[edge]), t=t)
        for edge, t in sorted(
            plan.support_activations, key=lambda item: (item[1], item[0])
        )
    ]
    events = [
        SupportEventDocument(
            robot=e.supporter, node=e.node, edge=list(g.edges[e.edge]), t=e.t
        )
        for e in plan.support_events
    ]
    return PlanDocument(
        status=outcome.status,
        j_exp=plan.j_exp,
        makespan=plan.makespan,
        robots=robots,
        supports=supports,
        method=method,
        support_map=assignments,
        paths=[list(p) for p in plan.paths],
        support_events=events,
    )


def plan_from_document(document: PlanDocument, g: Graph) -> Plan:
    """Rebuild a solved plan; costs are taken from the document as written."""
    if document.j_exp is None or document.makespan is None:
        raise ScenarioValidationError(
            f"Plan with status {document.status.value} has no actions"
        )
    actions = tuple(
        tuple(action_from_document(a, g) for a in robot.actions)
        for robot in document.robots
    )
    activations = frozenset(
        (g.edge_id(*entry.edge), entry.t) for entry in document.supports
    )
    events = tuple(
        SupportEvent(e.robot, e.node, g.edge_id(*e.edge), e.t)
        for e in document.support_events
    )
    return Plan(
        actions=actions,
        makespan=document.makespan,
        j_exp=document.j_exp,
        per_step_costs=(),
        support_activations=activations,
        paths=tuple(tuple(p) for p in document.paths),
        support_events=events,
    )


def support_map_from_documents(
    documents: List[SupportAssignmentDocument], g: Graph
) -> SupportMap:
    assignments = {}
    scores = {}
    for entry in documents:
        edge = g.edge_id(*entry.edge)
        assignments[edge] = tuple(entry.nodes)
        scores[edge] = tuple(entry.scores)
    return SupportMap(assignments=assignments, scores=scores)
