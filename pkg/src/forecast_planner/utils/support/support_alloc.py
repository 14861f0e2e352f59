"""Support node allocation for forecasted risky edges."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from forecast_planner.exceptions import ValidationError
from forecast_planner.utils.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_HOP_RADIUS,
    DEFAULT_SUPPORTS_PER_EDGE,
    RISK_EPSILON,
    Allocator,
    ScoringVariant,
)
from forecast_planner.utils.forecast.adversary_forecast import RiskForecast
from forecast_planner.utils.graph_core import Graph, canonical_shortest_path
from forecast_planner.utils.task_models import RobotTask


@dataclass(frozen=True)
class SupportConfig:
    k: int = DEFAULT_HOP_RADIUS
    s: int = DEFAULT_SUPPORTS_PER_EDGE
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    variant: ScoringVariant = ScoringVariant.RISK_PATH
    coverage_radius: Optional[int] = None

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValidationError(f"Hop radius k must be >= 0, got {self.k}")
        if self.s < 1:
            raise ValidationError(f"Supports per edge s must be >= 1, got {self.s}")
        if self.alpha <= 0:
            raise ValidationError(f"alpha must be > 0, got {self.alpha}")
        if self.beta < 0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")
        if self.coverage_radius is not None and self.coverage_radius < 0:
            raise ValidationError(
                f"Coverage radius must be >= 0, got {self.coverage_radius}"
            )

    @property
    def radius(self) -> int:
        """Hops defining the coverage set of a node."""
        return self.k if self.coverage_radius is None else self.coverage_radius


@dataclass(frozen=True)
class ScoreBreakdown:
    node: int
    p_hat: float
    r_hat: float
    r_raw: float
    score: float


@dataclass(frozen=True)
class SupportMap:
    """Allocated support nodes per risky edge (Gamma).

    ``assignments[e]`` lists at most s nodes; edges without candidates are
    absent.
    """

    assignments: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    scores: Dict[int, Tuple[float, ...]] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> SupportMap:
        return cls()

    def __len__(self) -> int:
        return len(self.assignments)

    def nodes_for(self, edge: int) -> Tuple[int, ...]:
        return self.assignments.get(edge, ())

    def allows(self, node: int, edge: int) -> bool:
        return node in self.assignments.get(edge, ())

    def edges_supported_from(self, node: int) -> Tuple[int, ...]:
        """Edges a robot standing at node may support, ascending."""
        return tuple(
            sorted(e for e, nodes in self.assignments.items() if node in nodes)
        )

    def includes(self, other: SupportMap) -> bool:
        return all(
            set(nodes) <= set(self.assignments.get(edge, ()))
            for edge, nodes in other.assignments.items()
        )

    def to_documents(self, g: Graph) -> List[Dict[str, Any]]:
        documents = []
        for edge in sorted(self.assignments):
            u, v = g.edges[edge]
            documents.append(
                {
                    "edge": [u, v],
                    "nodes": list(self.assignments[edge]),
                    "scores": list(self.scores.get(edge, ())),
                }
            )
        return documents


def coverage_set(g: Graph, node: int, config: SupportConfig) -> FrozenSet[int]:
    """Edges whose nearer endpoint is within the coverage radius of node."""
    return frozenset(
        e for e in range(g.edge_count) if g.edge_distance(node, e) <= config.radius
    )


def risky_edge_set(
    risk_forecast: RiskForecast, epsilon: float = RISK_EPSILON
) -> List[int]:
    """Edges with risk above epsilon at some t <= T, ascending."""
    if risk_forecast.edge_count == 0:
        return []
    peak = risk_forecast.risk.max(axis=0)
    return [int(e) for e in np.flatnonzero(peak > epsilon)]


def candidate_nodes(g: Graph, edge: int, config: SupportConfig) -> List[int]:
    # e in S(x) and min endpoint distance <= k collapse to one radius test
    limit = min(config.k, config.radius)
    return [x for x in range(g.node_count) if g.edge_distance(x, edge) <= limit]


def path_overlap(
    g: Graph, tasks: Sequence[RobotTask]
) -> Tuple[np.ndarray, np.ndarray]:
    """Raw and max-normalized counts of robot shortest paths through each node."""
    counts = np.zeros(g.node_count, dtype=np.int64)
    for task in tasks:
        for node in set(canonical_shortest_path(g, task.start, task.goal)):
            counts[node] += 1
    peak = counts.max() if counts.size else 0
    if peak == 0:
        return counts, np.zeros(g.node_count)
    return counts, counts / peak


def risk_potential(
    risk_forecast: RiskForecast, edge: int, node: int, g: Graph
) -> float:
    total = float(risk_forecast.risk[1:, edge].sum())
    return total / (1 + g.edge_distance(node, edge))


def score_candidates(
    g: Graph,
    edge: int,
    candidates: Sequence[int],
    p_hat: np.ndarray,
    risk_forecast: RiskForecast,
    config: SupportConfig,
) -> List[ScoreBreakdown]:
    if not candidates:
        raise ValidationError(f"Edge {edge} has no support candidates to score")

    r_raw = np.array([risk_potential(risk_forecast, edge, x, g) for x in candidates])
    weights = np.exp(r_raw - r_raw.max())
    r_hat = weights / weights.sum()

    breakdowns = []
    for x, raw, soft in zip(candidates, r_raw, r_hat):
        p = float(p_hat[x])
        if config.variant == ScoringVariant.RISK_PATH:
            score = config.alpha * p * (1.0 + config.beta * soft)
        elif config.variant == ScoringVariant.RISK_ONLY:
            score = soft
        elif config.variant == ScoringVariant.PATH_ONLY:
            score = p
        else:
            score = 1.0 / (1 + g.edge_distance(x, edge))
        breakdowns.append(
            ScoreBreakdown(
                node=x, p_hat=p, r_hat=float(soft), r_raw=float(raw), score=float(score)
            )
        )
    return breakdowns


def top_nodes(breakdowns: Sequence[ScoreBreakdown], s: int) -> List[ScoreBreakdown]:
    """Best s candidates by score, lower node id first on ties."""
    return sorted(breakdowns, key=lambda b: (-b.score, b.node))[:s]


def _scored_allocation(
    g: Graph,
    risk_forecast: RiskForecast,
    tasks: Sequence[RobotTask],
    config: SupportConfig,
    edges: Sequence[int],
) -> SupportMap:
    _, p_hat = path_overlap(g, tasks)
    assignments: Dict[int, Tuple[int, ...]] = {}
    scores: Dict[int, Tuple[float, ...]] = {}
    for edge in edges:
        candidates = candidate_nodes(g, edge, config)
        if not candidates:
            continue
        best = top_nodes(
            score_candidates(g, edge, candidates, p_hat, risk_forecast, config),
            config.s,
        )
        assignments[edge] = tuple(b.node for b in best)
        scores[edge] = tuple(b.score for b in best)
    return SupportMap(assignments=assignments, scores=scores)


def allocate(
    g: Graph,
    risk_forecast: RiskForecast,
    tasks: Sequence[RobotTask],
    config: SupportConfig,
) -> SupportMap:
    """Forecast-aware allocation over every risky edge."""
    return _scored_allocation(
        g, risk_forecast, tasks, config, risky_edge_set(risk_forecast)
    )


def allocate_baseline(
    g: Graph,
    risk_forecast: RiskForecast,
    config: SupportConfig,
    kind: Allocator,
    tasks: Sequence[RobotTask] = (),
    seed: Optional[int] = None,
) -> SupportMap:
    """Baseline allocators: uniform random, initial-snapshot (TCGRE) or none."""
    if kind == Allocator.NONE:
        return SupportMap.empty()

    if kind == Allocator.TCGRE:
        initially_risky = [
            e
            for e in risky_edge_set(risk_forecast)
            if risk_forecast.risk[0, e] > RISK_EPSILON
        ]
        return _scored_allocation(g, risk_forecast, tasks, config, initially_risky)

    if kind == Allocator.RANDOM:
        if seed is None:
            raise ValidationError("Random allocation needs an explicit seed")
        rng = np.random.default_rng(seed)
        assignments: Dict[int, Tuple[int, ...]] = {}
        for edge in risky_edge_set(risk_forecast):
            candidates = candidate_nodes(g, edge, config)
            if not candidates:
                continue
            size = min(config.s, len(candidates))
            picks = rng.choice(len(candidates), size=size, replace=False)
            assignments[edge] = tuple(candidates[int(i)] for i in picks)
        return SupportMap(assignments=assignments)

    return allocate(g, risk_forecast, tasks, config)
